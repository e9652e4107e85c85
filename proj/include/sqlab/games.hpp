#pragma once

#include <cstdint>
#include <vector>

#include "sqlab/core.hpp"

namespace sqlab {

using Subset = std::uint64_t;  // bitmask over distribution indices

enum class Kappa { K1, KV };
enum class Exactness { Exact, LowerBound, UpperBound, Approximate };

const char* kappa_name(Kappa k);
const char* exactness_name(Exactness e);

struct Limits {
  std::size_t max_dists = 32;         // subset enumeration over distributions
  std::size_t max_domain = 24;        // vertex enumeration over the domain
  std::size_t max_lp_calls = 1u << 20;
  std::size_t max_sign_dists = 20;    // sign-pattern enumeration over a measure support
};

inline int popcount(Subset s) { return __builtin_popcountll(s); }
inline Subset full_set(std::size_t n) { return n >= 64 ? ~Subset{0} : ((Subset{1} << n) - 1); }
std::vector<std::size_t> members(Subset s);

struct MarginResult {
  double margin = 0;  // +inf for the empty set
  std::vector<double> phi;
};

// max t s.t. s_D (D[phi] - D0[phi]) >= t for all D in S, phi in [-1,1]^X
MarginResult max_margin(const std::vector<std::vector<double>>& deltas, Subset s, Subset signs);

struct CoverFamily {
  std::size_t ground = 0;              // number of distributions
  std::vector<Subset> sets;            // maximal witnessed subsets
  std::vector<std::vector<double>> witnesses;  // one query table per set
  Kappa kappa = Kappa::K1;
  Exactness exactness = Exactness::Exact;
  double tau = 0;
  std::size_t lp_calls = 0;

  Subset coverable() const;
  CoverFamily restricted(Subset ground_mask) const;  // sets intersected, dominated ones dropped
};

std::vector<std::vector<double>> deltas_from(const std::vector<Distribution>& dists, const Distribution& d0);

// Maximal sets S with a single query phi giving |D[phi]-D0[phi]| > tau on all of S.
// K1 is exact via LPs; KV enumerates {0,1}^X vertices and is an under-approximation.
CoverFamily achievable_subsets(const std::vector<Distribution>& dists, const Distribution& d0, double tau, Kappa kappa,
                               const Limits& limits = {});

struct FractionalCover {
  double value = 0;           // d = min sum q_S
  std::vector<double> q;      // normalized: a probability over family sets
  std::size_t uncoverable = static_cast<std::size_t>(-1);
  bool finite() const { return uncoverable == static_cast<std::size_t>(-1); }
};

// covering LP over ground_mask elements: min sum q s.t. every element has weight >= 1
FractionalCover fractional_cover(const CoverFamily& family, Subset ground_mask);

struct CoverDual {
  double value = 0;           // min over mu of max_S mu(S)
  std::vector<double> mu;     // over all ground indices (zero off ground_mask)
};
// the packing side solved as its own LP
CoverDual cover_dual(const CoverFamily& family, Subset ground_mask);

struct GameValue {
  double value = 0;
  std::vector<double> row;   // maximizer mixed strategy
  std::vector<double> col;   // minimizer mixed strategy
};

// value of max_x min_y x^T A y; col strategy read from the LP duals
GameValue zero_sum(const std::vector<std::vector<double>>& a);
// the minimizer's LP solved directly
double zero_sum_min_side(const std::vector<std::vector<double>>& a);

}  // namespace sqlab
