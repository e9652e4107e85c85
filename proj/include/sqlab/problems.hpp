#pragma once

#include <string>
#include <vector>

#include "sqlab/games.hpp"
#include "sqlab/problem_spec.hpp"

namespace sqlab {

// ---- planted bi-clique over {0,1}^n ----
// D_S: uniform bits, except with probability k/n every coordinate in S is forced to 1.

DomainPtr cube_domain(std::size_t n);
std::vector<Subset> k_subsets(std::size_t n, std::size_t k);
std::string subset_name(Subset s);
Distribution biclique_distribution(const DomainPtr& cube, std::size_t n, std::size_t k, Subset planted);
// closed forms usable beyond table size
double biclique_conjunction(std::size_t n, std::size_t k, Subset planted, Subset t);  // D_S[all ones on T]
double biclique_parity(std::size_t n, std::size_t k, Subset planted, Subset t);       // D_S[(-1)^{sum x_T}]
QueryFn conjunction_query(const DomainPtr& cube, Subset t);

struct BicliqueFamily {
  std::size_t n = 0, k = 0;
  std::vector<Subset> planted;
  ProblemSpec decision;    // D_S against the uniform reference
  ProblemSpec search;      // recover S
  ProblemSpec verifiable;  // phi_S = all ones on S, threshold k/n
};
BicliqueFamily biclique_family(std::size_t n, std::size_t k);

// ---- Line_p: lines a1 z1 + a2 = z2 over GF_p^2, labels in {-1,+1} ----

enum class Marginal { Uniform, Skewed };

class LineP {
 public:
  explicit LineP(std::size_t p);

  std::size_t p() const { return p_; }
  std::size_t num_lines() const { return p_ * p_; }
  std::size_t num_points() const { return p_ * p_; }
  const DomainPtr& base() const { return base_; }
  const DomainPtr& labeled() const { return labeled_; }

  bool on_line(std::size_t line, std::size_t z) const;
  std::vector<int> hypothesis(std::size_t line) const;  // +1 on the line, -1 elsewhere
  bool parallel(std::size_t a, std::size_t b) const { return a / p_ == b / p_; }
  Distribution marginal(Marginal m, std::size_t line) const;
  Distribution target(Marginal m, std::size_t line) const;  // P^{l_a}
  std::string line_name(std::size_t line) const;

 private:
  std::size_t p_;
  DomainPtr base_, labeled_;
};

// dists = {P_a^{l_a}}, solutions = lines, valid iff error <= eps
ProblemSpec line_family(std::size_t p, Marginal m, double eps);

struct LineAudit {
  std::size_t p = 0;
  double same = 0, parallel = 0, other = 0;  // representative |D0[hat D_a hat D_b]|
  double same_err = 0, parallel_err = 0, other_err = 0;  // max deviation from closed forms
  double same_bound = 0, parallel_bound = 0;
  double rho = 0, rho_bound = 0, rho_closed = 0;
  double kbar1 = 0, kbar1_bound = 0;
  Exactness kbar1_exactness = Exactness::Exact;
  bool passes(double tol = 1e-10) const;
};
LineAudit line_audit(std::size_t p);

// ---- PAC learning over a labeled domain ----
// dists = {P^c : P in marginals, c in concepts}; solutions = hypotheses (default: the concepts);
// phi_h(z,b) = 1[h(z) != b], threshold eps
ProblemSpec pac_problem(const DomainPtr& labeled, const std::vector<Distribution>& marginals,
                        const std::vector<std::vector<int>>& concepts, double eps,
                        const std::vector<std::vector<int>>& hypotheses = {});
QueryFn disagreement_query(const DomainPtr& labeled, const std::vector<int>& h);
// P x uniform labels; KL from any P^f is ln 2
Distribution uniform_label_center(const Distribution& marginal, const DomainPtr& labeled);

}  // namespace sqlab
