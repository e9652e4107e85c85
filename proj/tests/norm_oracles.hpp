#pragma once

#include <cmath>
#include <vector>

#include "sqlab/core.hpp"

// brute-force references for the norm quantities, independent of src/norms.cpp

namespace oracle {

using namespace sqlab;

using Mat = std::vector<std::vector<double>>;

inline double kbar1_oracle(const Measure& mu, const std::vector<Distribution>& ds, const Distribution& d0) {
  const std::size_t n = d0.size();
  double best = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      double g = 0;
      for (std::size_t x = 0; x < n; ++x) g += ((mask >> x & 1) ? 1.0 : -1.0) * (ds[i][x] - d0[x]);
      s += mu[i] * std::fabs(g);
    }
    best = std::max(best, s);
  }
  return best;
}

inline std::vector<double> hat(const Distribution& d, const Distribution& d0) {
  std::vector<double> h(d0.size(), 0.0);
  for (std::size_t x = 0; x < d0.size(); ++x)
    if (d0[x] > 0) h[x] = d[x] / d0[x] - 1;
  return h;
}

inline double d0_inner(const Distribution& d0, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t x = 0; x < d0.size(); ++x) s += d0[x] * a[x] * b[x];
  return s;
}

// max over signs of || sum mu s hat D ||_{D0}
inline double kbar2_oracle(const Measure& mu, const std::vector<Distribution>& ds, const Distribution& d0) {
  double best = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << ds.size()); ++mask) {
    std::vector<double> v(d0.size(), 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      auto h = hat(ds[i], d0);
      for (std::size_t x = 0; x < v.size(); ++x) v[x] += ((mask >> i & 1) ? 1.0 : -1.0) * mu[i] * h[x];
    }
    best = std::max(best, std::sqrt(d0_inner(d0, v, v)));
  }
  return best;
}

// cyclic Jacobi on a symmetric matrix, returns the largest eigenvalue
inline double top_eigen(Mat a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  double best = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, a[i][i]);
  return best;
}

inline double spectral_oracle(const Measure& mu, const std::vector<Distribution>& ds, const Distribution& d0) {
  const std::size_t m = ds.size();
  Mat k(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      k[i][j] = std::sqrt(mu[i] * mu[j]) * d0_inner(d0, hat(ds[i], d0), hat(ds[j], d0));
  return std::sqrt(std::max(0.0, top_eigen(k)));
}


}  // namespace oracle
