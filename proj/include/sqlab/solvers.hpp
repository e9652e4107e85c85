#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sqlab/games.hpp"
#include "sqlab/oracles.hpp"
#include "sqlab/problem_spec.hpp"
#include "sqlab/problems.hpp"

namespace sqlab {

// ---- multiplicative weights: w <- w (1 - gamma z), renormalized ----
class MultiplicativeWeights {
 public:
  MultiplicativeWeights(std::vector<double> w1, double gamma);

  void update(const std::vector<double>& z);
  const std::vector<double>& weights() const { return w_; }
  const std::vector<double>& initial() const { return w1_; }
  double gamma() const { return gamma_; }
  std::size_t steps() const { return steps_; }
  double learner_loss() const { return learner_loss_; }             // sum_t <w^t, z^t>
  const std::vector<double>& expert_losses() const { return expert_; }  // sum_t z^t_i
  double regret(const std::vector<double>& comparator) const;
  double best_expert_regret() const;

 private:
  std::vector<double> w1_, w_, expert_;
  double gamma_;
  double learner_loss_ = 0;
  std::size_t steps_ = 0;
};

MultiplicativeWeights mw_run(std::vector<double> w1, double gamma,
                             const std::function<std::vector<double>(std::size_t)>& loss, std::size_t steps);

// ---- cover oracles ----
struct CoverResponse {
  std::size_t solution = 0;
  std::vector<double> solution_measure;  // over problem solutions
  std::vector<QueryFn> queries;
  std::vector<double> query_weights;
  double d = 1;
  std::vector<std::size_t> uncovered;  // distributions no single query separates by more than tau
};

using CoverOracle = std::function<CoverResponse(const Distribution& reference)>;

// Witnesses are the per-distribution sign queries (K1) or superlevel indicators (KV);
// the solution picked is one whose rejected set is fully covered, using the fewest
// greedy queries, falling back to the solution of the nearest distribution.
CoverOracle greedy_cover_oracle(const ProblemSpec& p, double tau, Kappa kappa);

// queries separating every distribution from the reference (decision cover)
CoverResponse greedy_decision_cover(const std::vector<Distribution>& dists, const Distribution& reference, double tau,
                                    Kappa kappa);

enum class SolverMode { Deterministic, Randomized };

struct SolverOptions {
  Kappa kappa = Kappa::K1;
  SolverMode mode = SolverMode::Deterministic;
  double delta = 0.1;
  bool project_to_hull = false;  // MW over mixture coefficients instead of the domain simplex
  std::uint64_t seed = 0;
  std::optional<Distribution> start;
};

struct RunReport {
  std::string outcome;  // "solution", "no_solution", "budget_exceeded"
  std::optional<std::size_t> solution;
  std::size_t queries = 0;
  std::size_t updates = 0;
  std::size_t update_budget = 0;
  double kl_bound = 0;
  double valid_answer_fraction = 1;
  std::uint64_t seed = 0;
  bool theorem_violation = false;
  std::vector<std::pair<std::size_t, int>> history;  // (query index within step, sign)
  std::vector<double> final_reference;
};

std::size_t update_budget(double kl_bound, double tau, Kappa kappa);

RunReport solve_search_universal(const ProblemSpec& p, const CoverOracle& oracle, double tau, OracleSession& session,
                                 const SolverOptions& opt = {});
RunReport solve_verifiable(const ProblemSpec& p, double theta, double tau, OracleSession& session,
                           const SolverOptions& opt = {});
// binary search over theta with ceil(log2(4/tau)) probes of the verifiable solver at 3tau/4
RunReport solve_optimizing(const ProblemSpec& p, double tau, OracleSession& session, const SolverOptions& opt = {});

struct DecisionRun {
  bool alternative = false;  // true: input differs from D0
  std::size_t queries = 0;
  std::size_t samples = 0;  // witnesses drawn
};
// draws ceil(d ln(1/delta)) witnesses from q, asks STAT(tau/2)
DecisionRun solve_decision_sampled(const std::vector<QueryFn>& witnesses, const std::vector<double>& q, double d,
                                   double tau, double delta, const Distribution& d0, OracleSession& session, Rng& rng);

struct LearnResult {
  std::vector<int> hypothesis;
  std::size_t queries = 0;
  std::size_t label_queries = 0;
  std::size_t candidates = 0;
  double error = 0;  // exact error against the session input
};
// distribution-specific Line_p learner with STAT(eps^2/13)
LearnResult line_p_learn(const LineP& lp, const Distribution& marginal, double eps, OracleSession& session);

}  // namespace sqlab
