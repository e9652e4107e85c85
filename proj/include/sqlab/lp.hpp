#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace sqlab::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Constraint {
  std::vector<double> coeffs;
  Sense sense = Sense::LessEqual;
  double rhs = 0;
};

// maximize objective . x subject to constraints and lower <= x <= upper.
// Missing bounds default to x >= 0.
struct Program {
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;

  explicit Program(std::size_t nvars = 0) : objective(nvars, 0.0), lower(nvars, 0.0), upper(nvars, kInf) {}
  std::size_t num_vars() const { return objective.size(); }
  void add(std::vector<double> coeffs, Sense sense, double rhs) { constraints.push_back({std::move(coeffs), sense, rhs}); }
  void free_var(std::size_t j) { lower[j] = -kInf; upper[j] = kInf; }
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  double value = 0;
  std::vector<double> x;
  // one multiplier per constraint: >= 0 for <=, <= 0 for >=, free for =
  std::vector<double> duals;
  double dual_value = 0;  // objective of the standard-form dual
  std::size_t pivots = 0;
};

// Dense two-phase tableau simplex with Bland's anti-cycling rule.
Solution solve(const Program& p, double eps = 1e-10);

}  // namespace sqlab::lp
