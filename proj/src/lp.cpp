#include "sqlab/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace sqlab::lp {

namespace {

struct Term {
  std::size_t col;
  double coef;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), w_(cols + 1), t_(rows * (cols + 1), 0.0), r_(cols + 1, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * w_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * w_ + j]; }
  double& rhs(std::size_t i) { return t_[i * w_ + w_ - 1]; }
  double& cost(std::size_t j) { return r_[j]; }
  double& obj() { return r_[w_ - 1]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return w_ - 1; }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = &t_[pr * w_];
    double inv = 1.0 / prow[pc];
    for (std::size_t j = 0; j < w_; ++j) prow[j] *= inv;
    prow[pc] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == pr) continue;
      double* row = &t_[i * w_];
      double f = row[pc];
      if (f == 0) continue;
      for (std::size_t j = 0; j < w_; ++j) row[j] -= f * prow[j];
      row[pc] = 0.0;
    }
    double f = r_[pc];
    if (f != 0) {
      for (std::size_t j = 0; j < w_; ++j) r_[j] -= f * prow[j];
      r_[pc] = 0.0;
    }
  }

 private:
  std::size_t m_, w_;
  std::vector<double> t_;
  std::vector<double> r_;
};

// returns false when unbounded
bool run_simplex(Tableau& t, std::vector<std::size_t>& basis, std::size_t enter_limit, double eps, std::size_t& pivots) {
  for (;;) {
    std::size_t e = enter_limit;
    for (std::size_t j = 0; j < enter_limit; ++j)
      if (t.cost(j) < -eps) {
        e = j;
        break;
      }
    if (e == enter_limit) return true;
    std::size_t leave = t.rows();
    double best = 0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      double a = t.at(i, e);
      if (a <= eps) continue;
      double ratio = t.rhs(i) / a;
      if (leave == t.rows() || ratio < best - 1e-12 || (ratio <= best + 1e-12 && basis[i] < basis[leave])) {
        if (leave == t.rows() || ratio < best - 1e-12) best = ratio;
        leave = i;
      }
    }
    if (leave == t.rows()) return false;
    t.pivot(leave, e);
    basis[leave] = e;
    ++pivots;
  }
}

}  // namespace

Solution solve(const Program& p, double eps) {
  const std::size_t nv = p.num_vars();
  if (p.lower.size() != nv || p.upper.size() != nv) throw std::invalid_argument("lp: bound vectors have wrong length");

  // variable substitution into nonnegative columns
  std::vector<std::vector<Term>> map(nv);
  std::vector<double> offset(nv, 0.0);
  std::size_t ny = 0;
  struct BoundRow {
    std::size_t col;
    double ub;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < nv; ++j) {
    double lo = p.lower[j], hi = p.upper[j];
    if (lo > hi) {
      Solution s;
      s.status = Status::Infeasible;
      return s;
    }
    if (std::isfinite(lo)) {
      offset[j] = lo;
      map[j].push_back({ny, 1.0});
      if (std::isfinite(hi)) bound_rows.push_back({ny, hi - lo});
      ++ny;
    } else if (std::isfinite(hi)) {
      offset[j] = hi;
      map[j].push_back({ny++, -1.0});
    } else {
      map[j].push_back({ny++, 1.0});
      map[j].push_back({ny++, -1.0});
    }
  }

  // standard rows: A y <= b; origin records (constraint index, sign)
  struct StdRow {
    std::vector<double> a;
    double b;
    long origin;  // constraint index, or -1 for bound rows
    double sign;
  };
  std::vector<StdRow> rows;
  for (std::size_t c = 0; c < p.constraints.size(); ++c) {
    const auto& con = p.constraints[c];
    if (con.coeffs.size() != nv) throw std::invalid_argument("lp: constraint has wrong length");
    std::vector<double> a(ny, 0.0);
    double b = con.rhs;
    for (std::size_t j = 0; j < nv; ++j) {
      double cj = con.coeffs[j];
      if (cj == 0) continue;
      b -= cj * offset[j];
      for (const auto& t : map[j]) a[t.col] += cj * t.coef;
    }
    if (con.sense != Sense::GreaterEqual) rows.push_back({a, b, static_cast<long>(c), 1.0});
    if (con.sense != Sense::LessEqual) {
      for (double& x : a) x = -x;
      rows.push_back({std::move(a), -b, static_cast<long>(c), -1.0});
    }
  }
  for (const auto& br : bound_rows) {
    std::vector<double> a(ny, 0.0);
    a[br.col] = 1.0;
    rows.push_back({std::move(a), br.ub, -1, 1.0});
  }

  std::vector<double> cy(ny, 0.0);
  double c0 = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    c0 += p.objective[j] * offset[j];
    for (const auto& t : map[j]) cy[t.col] += p.objective[j] * t.coef;
  }

  const std::size_t m = rows.size();
  std::size_t nart = 0;
  for (const auto& r : rows) nart += r.b < 0 ? 1 : 0;
  const std::size_t slack0 = ny, art0 = ny + m, ncols = ny + m + nart;
  Tableau t(m, ncols);
  std::vector<std::size_t> basis(m);
  std::size_t a_next = art0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = rows[i].b < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < ny; ++j) t.at(i, j) = s * rows[i].a[j];
    t.at(i, slack0 + i) = s;
    t.rhs(i) = s * rows[i].b;
    if (s < 0) {
      t.at(i, a_next) = 1.0;
      basis[i] = a_next++;
    } else {
      basis[i] = slack0 + i;
    }
  }

  Solution sol;
  if (nart) {
    // phase 1: maximize -sum(artificials)
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < art0) continue;
      for (std::size_t j = 0; j <= ncols; ++j)
        if (j < art0 || j == ncols) (j == ncols ? t.obj() : t.cost(j)) -= t.at(i, j);
    }
    run_simplex(t, basis, ncols, eps, sol.pivots);
    if (t.obj() < -1e-9) {
      sol.status = Status::Infeasible;
      return sol;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < art0) continue;
      for (std::size_t j = 0; j < art0; ++j)
        if (std::fabs(t.at(i, j)) > 1e-9) {
          t.pivot(i, j);
          basis[i] = j;
          ++sol.pivots;
          break;
        }
    }
  }

  // phase 2 reduced costs
  for (std::size_t j = 0; j <= ncols; ++j) (j == ncols ? t.obj() : t.cost(j)) = 0.0;
  for (std::size_t j = 0; j < ny; ++j) t.cost(j) = -cy[j];
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t bj = basis[i];
    double cb = bj < ny ? cy[bj] : 0.0;
    if (cb == 0) continue;
    for (std::size_t j = 0; j < ncols; ++j) t.cost(j) += cb * t.at(i, j);
    t.obj() += cb * t.rhs(i);
  }
  if (!run_simplex(t, basis, art0, eps, sol.pivots)) {
    sol.status = Status::Unbounded;
    return sol;
  }

  std::vector<double> y(ny, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < ny) y[basis[i]] = t.rhs(i);
  sol.x.assign(nv, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    double v = offset[j];
    for (const auto& tm : map[j]) v += tm.coef * y[tm.col];
    sol.x[j] = v;
  }
  sol.value = t.obj() + c0;
  sol.duals.assign(p.constraints.size(), 0.0);
  sol.dual_value = c0;
  for (std::size_t i = 0; i < m; ++i) {
    double yi = t.cost(slack0 + i);
    if (yi < 0 && yi > -1e-9) yi = 0;
    sol.dual_value += rows[i].b * yi;
    if (rows[i].origin >= 0) sol.duals[static_cast<std::size_t>(rows[i].origin)] += rows[i].sign * yi;
  }
  sol.status = Status::Optimal;
  return sol;
}

}  // namespace sqlab::lp
