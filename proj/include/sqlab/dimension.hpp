#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqlab/games.hpp"
#include "sqlab/problem_spec.hpp"

namespace sqlab {

struct DimensionReport {
  std::string quantity;
  double value = 0;  // +inf when some distribution cannot be told apart
  Exactness exactness = Exactness::Exact;
  double lower = 0, upper = 0;  // bracket on the true quantity

  // certificate
  std::vector<std::vector<double>> queries;
  std::vector<double> query_weights;
  std::vector<Subset> subsets;
  std::vector<double> measure;
  std::vector<double> reference;
  std::optional<std::size_t> uncoverable;
  std::optional<double> dual_value;  // independently solved dual LP
  std::string note;
};

enum class CoverMode { Exact, Greedy };

// all-distribution reference candidates: uniform over X, uniform mixture, the
// problem reference, then any extras
std::vector<Distribution> reference_candidates(const ProblemSpec& p, const std::vector<Distribution>& extra = {});

DimensionReport rsd_decision(const std::vector<Distribution>& dists, const Distribution& d0, double tau, Kappa kappa,
                             const Limits& limits = {});
// uniform measures over subsets; needs |dists| <= 16
DimensionReport sd_decision(const std::vector<Distribution>& dists, const Distribution& d0, double tau, Kappa kappa,
                            const Limits& limits = {});
DimensionReport det_cover(const std::vector<Distribution>& dists, const Distribution& d0, double tau, CoverMode mode,
                          const Limits& limits = {});
// sample ceil(d ln(1/delta)) witnesses from q and keep the first draw covering mu-mass >= 1-delta
DimensionReport rand_to_det(const CoverFamily& family, const std::vector<double>& q, double d, double delta,
                            const Measure& mu, Rng& rng);

// rsd from a precomputed family over a sub-ground
DimensionReport rsd_from_family(const CoverFamily& family, Subset ground);

// sup over candidate D0 of inf over solution measures P of RSD(B(dists \ Z_P(alpha), D0))
DimensionReport rsd_search(const ProblemSpec& p, double tau, double alpha, const std::vector<Distribution>& candidates,
                           const Limits& limits = {});
DimensionReport sd_search(const ProblemSpec& p, double tau, const std::vector<Distribution>& candidates,
                          const Limits& limits = {});
DimensionReport rsd_verifiable(const ProblemSpec& p, double theta, double tau,
                               const std::vector<Distribution>& candidates, const Limits& limits = {});
DimensionReport rsd_optimizing(const ProblemSpec& p, double eps, double tau, const std::vector<double>& theta_grid,
                               const std::vector<Distribution>& candidates, const Limits& limits = {});

// sup_mu 1 / kbar(mu, D0) as a zero-sum game over domain vertices
DimensionReport crsd(const std::vector<Distribution>& dists, const Distribution& d0, Kappa kappa,
                     const Limits& limits = {});

struct RelationRow {
  double tau = 0;
  double rsd = 0;
  double bound = 0;
  std::string relation;  // "<=" or ">"
  bool holds = false;
};

struct CombinedAudit {
  double d = 0;
  std::vector<RelationRow> rows;
  bool all_hold() const;
};

CombinedAudit combined_relation_audit(const std::vector<Distribution>& dists, const Distribution& d0,
                                      const Limits& limits = {});

// (beta - max_f mu(Z_f)) / kappa1_frac(mu, D0, tau), mu over p.dists
double simple_lower_bound(const Measure& mu, const Distribution& d0, double tau, double beta, const ProblemSpec& p,
                          const Limits& limits = {});

}  // namespace sqlab
