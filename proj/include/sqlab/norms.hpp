#pragma once

#include <vector>

#include "sqlab/core.hpp"
#include "sqlab/games.hpp"

namespace sqlab {

struct NormReport {
  double value = 0;
  Exactness exactness = Exactness::Exact;
  std::vector<double> query;   // maximizing query, when one exists
  std::vector<int> signs;      // sign pattern over the measure support
  Subset subset = 0;           // distinguished subset for fractional quantities
};

// E_mu |D[phi]-D0[phi]| and E_mu |sqrt D[phi] - sqrt D0[phi]| at a fixed query
double kbar1_at(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0,
                const std::vector<double>& phi);
double kbarv_at(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0,
                const std::vector<double>& phi);

// max over phi in [-1,1]^X; exact by vertex enumeration on the smaller axis
NormReport kbar1(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0,
                 const Limits& limits = {});
// max over ||phi||_{D0} = 1; exact by sign enumeration over supp(mu)
NormReport kbar2(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0,
                 const Limits& limits = {});
// top singular value of B_mu^{1/2} A B_{D0}^{-1/2} by power iteration
NormReport kbar2_spectral(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0);
// max over phi in [0,1]^X; binary vertices plus one sweep of grid coordinate ascent
NormReport kbarv(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0,
                 const Limits& limits = {});

double rho(const std::vector<Distribution>& dists, const Distribution& d0);
double rho_weighted(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0);
// D0[hat D_i hat D_j] for all pairs
std::vector<std::vector<double>> correlation_matrix(const std::vector<Distribution>& dists, const Distribution& d0);

// max_phi Pr_mu[|D[phi]-D0[phi]| > tau]; exact
NormReport kappa1_frac(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0, double tau,
                       const Limits& limits = {});
// max_phi Pr_mu[|sqrt D[phi] - sqrt D0[phi]| > tau]; lower bound
NormReport kappav_frac(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0, double tau,
                       const Limits& limits = {});
// max mu(D') over D' with kbarv(mu|D') > tau; lower bound
NormReport kbarv_frac(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0, double tau,
                      const Limits& limits = {});

}  // namespace sqlab
