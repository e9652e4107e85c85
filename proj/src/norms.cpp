#include "sqlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sqlab {

namespace {

void check_measure(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0) {
  if (mu.size() != dists.size()) throw Error(ErrorKind::InvalidArgument, "measure and distribution list differ in length");
  if (dists.empty()) throw Error(ErrorKind::InvalidArgument, "no distributions");
  for (const auto& d : dists) require_same_domain(d.domain(), d0.domain(), "norm");
}

double sqrt0(double x) { return std::sqrt(std::max(x, 0.0)); }

struct Supported {
  std::vector<std::size_t> idx;
  std::vector<double> w;
};

Supported supported(const Measure& mu) {
  Supported s;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] > 0) {
      s.idx.push_back(i);
      s.w.push_back(mu[i]);
    }
  return s;
}

// Gray-code walk over {0,1}^n; visit(bits, flipped) is called for every vertex,
// flipped = n for the first one.
template <class F>
void gray_walk(std::size_t n, F&& visit) {
  const std::uint64_t total = std::uint64_t{1} << n;
  std::uint64_t cur = 0;
  visit(cur, n);
  for (std::uint64_t k = 1; k < total; ++k) {
    std::uint64_t g = k ^ (k >> 1);
    std::size_t x = static_cast<std::size_t>(__builtin_ctzll(g ^ cur));
    cur = g;
    visit(cur, x);
  }
}

}  // namespace

double kbar1_at(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0,
                const std::vector<double>& phi) {
  check_measure(mu, dists, d0);
  double p0 = dot(d0.span(), phi), s = 0;
  for (std::size_t i = 0; i < dists.size(); ++i)
    if (mu[i] > 0) s += mu[i] * std::fabs(dot(dists[i].span(), phi) - p0);
  return s;
}

double kbarv_at(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0,
                const std::vector<double>& phi) {
  check_measure(mu, dists, d0);
  double r0 = sqrt0(dot(d0.span(), phi)), s = 0;
  for (std::size_t i = 0; i < dists.size(); ++i)
    if (mu[i] > 0) s += mu[i] * std::fabs(sqrt0(dot(dists[i].span(), phi)) - r0);
  return s;
}

NormReport kbar1(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0,
                 const Limits& limits) {
  check_measure(mu, dists, d0);
  auto sup = supported(mu);
  const std::size_t ns = sup.idx.size(), nx = d0.size();
  const bool x_ok = nx <= limits.max_domain, s_ok = ns <= limits.max_sign_dists;
  if (!x_ok && !s_ok) throw Error(ErrorKind::GuardExceeded, "kbar1 needs |X| <= 24 or |supp mu| <= 20");
  std::vector<std::vector<double>> delta(ns);
  for (std::size_t k = 0; k < ns; ++k) delta[k] = difference(dists[sup.idx[k]].span(), d0.span());
  NormReport rep;
  rep.value = -1;
  if (x_ok && (!s_ok || nx <= ns)) {
    // phi in {-1,1}^X with phi[0] = +1
    std::vector<double> val(ns);
    for (std::size_t k = 0; k < ns; ++k) val[k] = -std::accumulate(delta[k].begin(), delta[k].end(), 0.0) + 2 * delta[k][0];
    std::uint64_t best_bits = 0;
    gray_walk(nx - 1, [&](std::uint64_t bits, std::size_t flipped) {
      if (flipped < nx - 1) {
        std::size_t x = flipped + 1;
        double sg = (bits >> flipped & 1) ? 2.0 : -2.0;
        for (std::size_t k = 0; k < ns; ++k) val[k] += sg * delta[k][x];
      }
      double s = 0;
      for (std::size_t k = 0; k < ns; ++k) s += sup.w[k] * std::fabs(val[k]);
      if (s > rep.value + 1e-15) {
        rep.value = s;
        best_bits = bits;
      }
    });
    rep.query.assign(nx, -1.0);
    rep.query[0] = 1.0;
    for (std::size_t x = 1; x < nx; ++x)
      if (best_bits >> (x - 1) & 1) rep.query[x] = 1.0;
    rep.signs.assign(dists.size(), 0);
    for (std::size_t k = 0; k < ns; ++k) rep.signs[sup.idx[k]] = dot(delta[k], rep.query) >= 0 ? 1 : -1;
  } else {
    // s in {-1,1}^supp with s[0] = +1; value = || sum mu s delta ||_1
    std::vector<double> g(nx, 0.0);
    for (std::size_t k = 0; k < ns; ++k) {
      double sg = k == 0 ? 1.0 : -1.0;
      for (std::size_t x = 0; x < nx; ++x) g[x] += sg * sup.w[k] * delta[k][x];
    }
    std::uint64_t best_bits = 0;
    gray_walk(ns - 1, [&](std::uint64_t bits, std::size_t flipped) {
      if (flipped < ns - 1) {
        std::size_t k = flipped + 1;
        double sg = (bits >> flipped & 1) ? 2.0 : -2.0;
        for (std::size_t x = 0; x < nx; ++x) g[x] += sg * sup.w[k] * delta[k][x];
      }
      double s = 0;
      for (double v : g) s += std::fabs(v);
      if (s > rep.value + 1e-15) {
        rep.value = s;
        best_bits = bits;
      }
    });
    std::vector<double> best(nx, 0.0);
    rep.signs.assign(dists.size(), 0);
    for (std::size_t k = 0; k < ns; ++k) {
      int sg = (k == 0 || (best_bits >> (k - 1) & 1)) ? 1 : -1;
      rep.signs[sup.idx[k]] = sg;
      for (std::size_t x = 0; x < nx; ++x) best[x] += sg * sup.w[k] * delta[k][x];
    }
    rep.query.resize(nx);
    for (std::size_t x = 0; x < nx; ++x) rep.query[x] = best[x] >= 0 ? 1.0 : -1.0;
  }
  rep.value = std::max(rep.value, 0.0);
  return rep;
}

NormReport kbar2(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0,
                 const Limits& limits) {
  check_measure(mu, dists, d0);
  auto sup = supported(mu);
  const std::size_t ns = sup.idx.size(), nx = d0.size();
  if (ns > limits.max_sign_dists) throw Error(ErrorKind::GuardExceeded, "kbar2 needs |supp mu| <= 20");
  std::vector<std::vector<double>> hat(ns);
  for (std::size_t k = 0; k < ns; ++k) hat[k] = likelihood_hat(dists[sup.idx[k]], d0);
  std::vector<double> g(nx, 0.0);
  for (std::size_t k = 0; k < ns; ++k) {
    double sg = k == 0 ? 1.0 : -1.0;
    for (std::size_t x = 0; x < nx; ++x) g[x] += sg * sup.w[k] * hat[k][x];
  }
  auto norm2 = [&](const std::vector<double>& v) {
    double s = 0;
    for (std::size_t x = 0; x < nx; ++x) s += d0[x] * v[x] * v[x];
    return s;
  };
  NormReport rep;
  double best = -1;
  std::uint64_t best_bits = 0;
  gray_walk(ns - 1, [&](std::uint64_t bits, std::size_t flipped) {
    if (flipped < ns - 1) {
      std::size_t k = flipped + 1;
      double sg = (bits >> flipped & 1) ? 2.0 : -2.0;
      for (std::size_t x = 0; x < nx; ++x) g[x] += sg * sup.w[k] * hat[k][x];
    }
    double s = norm2(g);
    if (s > best + 1e-15) {
      best = s;
      best_bits = bits;
    }
  });
  std::vector<double> v(nx, 0.0);
  rep.signs.assign(dists.size(), 0);
  for (std::size_t k = 0; k < ns; ++k) {
    int sg = (k == 0 || (best_bits >> (k - 1) & 1)) ? 1 : -1;
    rep.signs[sup.idx[k]] = sg;
    for (std::size_t x = 0; x < nx; ++x) v[x] += sg * sup.w[k] * hat[k][x];
  }
  rep.value = std::sqrt(std::max(norm2(v), 0.0));
  rep.query.assign(nx, 0.0);
  if (rep.value > 0)
    for (std::size_t x = 0; x < nx; ++x) rep.query[x] = v[x] / rep.value;
  return rep;
}

NormReport kbar2_spectral(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0) {
  check_measure(mu, dists, d0);
  auto sup = supported(mu);
  std::vector<std::size_t> xs;
  for (std::size_t x = 0; x < d0.size(); ++x)
    if (d0[x] > 0) xs.push_back(x);
  const std::size_t ns = sup.idx.size(), nx = xs.size();
  std::vector<std::vector<double>> m(ns, std::vector<double>(nx));
  for (std::size_t k = 0; k < ns; ++k) {
    auto h = likelihood_hat(dists[sup.idx[k]], d0);
    for (std::size_t j = 0; j < nx; ++j) m[k][j] = std::sqrt(sup.w[k]) * std::sqrt(d0[xs[j]]) * h[xs[j]];
  }
  // Gram matrix on the smaller side
  const bool left = ns <= nx;
  const std::size_t n = left ? ns : nx;
  std::vector<double> gram(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      double s = 0;
      if (left)
        for (std::size_t j = 0; j < nx; ++j) s += m[a][j] * m[b][j];
      else
        for (std::size_t k = 0; k < ns; ++k) s += m[k][a] * m[k][b];
      gram[a * n + b] = gram[b * n + a] = s;
    }
  Rng rng(0x5eed);
  std::vector<double> v(n), w(n);
  double nv = 0;
  for (auto& x : v) {
    x = 0.5 + uniform01(rng);
    nv += x * x;
  }
  for (auto& x : v) x /= std::sqrt(nv);
  double lambda = 0;
  for (int it = 0; it < 200000; ++it) {
    for (std::size_t a = 0; a < n; ++a) {
      double s = 0;
      for (std::size_t b = 0; b < n; ++b) s += gram[a * n + b] * v[b];
      w[a] = s;
    }
    double next = dot(v, w), nw = std::sqrt(dot(w, w));
    if (nw == 0) {
      lambda = 0;
      break;
    }
    for (std::size_t a = 0; a < n; ++a) v[a] = w[a] / nw;
    bool done = it > 2 && std::fabs(next - lambda) <= 1e-13 * std::max(next, 1e-300);
    lambda = next;
    if (done) break;
  }
  NormReport rep;
  rep.value = std::sqrt(std::max(lambda, 0.0));
  return rep;
}

std::vector<std::vector<double>> correlation_matrix(const std::vector<Distribution>& dists, const Distribution& d0) {
  std::vector<std::vector<double>> hat;
  for (const auto& d : dists) hat.push_back(likelihood_hat(d, d0));
  const std::size_t m = dists.size();
  std::vector<std::vector<double>> c(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      double s = 0;
      for (std::size_t x = 0; x < d0.size(); ++x) s += d0[x] * hat[i][x] * hat[j][x];
      c[i][j] = c[j][i] = s;
    }
  return c;
}

double rho_weighted(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0) {
  check_measure(mu, dists, d0);
  auto c = correlation_matrix(dists, d0);
  double s = 0;
  for (std::size_t i = 0; i < dists.size(); ++i)
    for (std::size_t j = 0; j < dists.size(); ++j) s += mu[i] * mu[j] * std::fabs(c[i][j]);
  return s;
}

double rho(const std::vector<Distribution>& dists, const Distribution& d0) {
  return rho_weighted(Measure::uniform(dists.size()), dists, d0);
}

namespace {

// shared {0,1}^X search; score(vals, v0) evaluated on vertices, then a single
// grid sweep of coordinate ascent at step 1/16
template <class Score>
NormReport unit_query_search(const std::vector<Distribution>& dists, const std::vector<std::size_t>& idx,
                             const Distribution& d0, const Limits& limits, Score&& score) {
  const std::size_t nx = d0.size(), ns = idx.size();
  if (nx > limits.max_domain) throw Error(ErrorKind::GuardExceeded, "vertex enumeration needs |X| <= 24");
  std::vector<double> val(ns, 0.0);
  double v0 = 0, best = -1;
  std::uint64_t best_bits = 0;
  gray_walk(nx, [&](std::uint64_t bits, std::size_t x) {
    if (x < nx) {
      double sg = (bits >> x & 1) ? 1.0 : -1.0;
      for (std::size_t k = 0; k < ns; ++k) val[k] += sg * dists[idx[k]][x];
      v0 += sg * d0[x];
    }
    double s = score(val, v0);
    if (s > best + 1e-15) {
      best = s;
      best_bits = bits;
    }
  });
  std::vector<double> phi(nx);
  for (std::size_t x = 0; x < nx; ++x) phi[x] = (best_bits >> x & 1) ? 1.0 : 0.0;
  for (std::size_t k = 0; k < ns; ++k) val[k] = dot(dists[idx[k]].span(), phi);
  v0 = dot(d0.span(), phi);
  std::vector<double> trial(ns);
  for (std::size_t x = 0; x < nx; ++x) {
    double keep = phi[x];
    for (int g = 0; g <= 16; ++g) {
      double t = g / 16.0, dt = t - phi[x];
      if (dt == 0) continue;
      for (std::size_t k = 0; k < ns; ++k) trial[k] = val[k] + dt * dists[idx[k]][x];
      double s = score(trial, v0 + dt * d0[x]);
      if (s > best + 1e-15) {
        best = s;
        keep = t;
      }
    }
    double dt = keep - phi[x];
    if (dt != 0) {
      for (std::size_t k = 0; k < ns; ++k) val[k] += dt * dists[idx[k]][x];
      v0 += dt * d0[x];
      phi[x] = keep;
    }
  }
  NormReport rep;
  rep.value = std::max(best, 0.0);
  rep.exactness = Exactness::LowerBound;
  rep.query = std::move(phi);
  return rep;
}

}  // namespace

NormReport kbarv(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0,
                 const Limits& limits) {
  check_measure(mu, dists, d0);
  auto sup = supported(mu);
  return unit_query_search(dists, sup.idx, d0, limits, [&](const std::vector<double>& val, double v0) {
    double r0 = sqrt0(v0), s = 0;
    for (std::size_t k = 0; k < val.size(); ++k) s += sup.w[k] * std::fabs(sqrt0(val[k]) - r0);
    return s;
  });
}

NormReport kappa1_frac(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0, double tau,
                       const Limits& limits) {
  check_measure(mu, dists, d0);
  auto sup = supported(mu);
  std::vector<Distribution> sub;
  for (auto i : sup.idx) sub.push_back(dists[i]);
  auto fam = achievable_subsets(sub, d0, tau, Kappa::K1, limits);
  NormReport rep;
  for (std::size_t s = 0; s < fam.sets.size(); ++s) {
    double mass = 0;
    Subset full = 0;
    for (auto k : members(fam.sets[s])) {
      mass += sup.w[k];
      full |= Subset{1} << sup.idx[k];
    }
    if (mass > rep.value) {
      rep.value = mass;
      rep.subset = full;
      rep.query = fam.witnesses[s];
    }
  }
  return rep;
}

NormReport kappav_frac(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0, double tau,
                       const Limits& limits) {
  check_measure(mu, dists, d0);
  if (dists.size() > 64) throw Error(ErrorKind::GuardExceeded, "at most 64 distributions");
  auto sup = supported(mu);
  const double need = tau + kStrictSlack;
  auto rep = unit_query_search(dists, sup.idx, d0, limits, [&](const std::vector<double>& val, double v0) {
    double r0 = sqrt0(v0), s = 0;
    for (std::size_t k = 0; k < val.size(); ++k)
      if (std::fabs(sqrt0(val[k]) - r0) >= need) s += sup.w[k];
    return s;
  });
  double r0 = sqrt0(dot(d0.span(), rep.query));
  for (std::size_t k = 0; k < sup.idx.size(); ++k)
    if (std::fabs(sqrt0(dot(dists[sup.idx[k]].span(), rep.query)) - r0) >= need) rep.subset |= Subset{1} << sup.idx[k];
  return rep;
}

NormReport kbarv_frac(const Measure& mu, const std::vector<Distribution>& dists, const Distribution& d0, double tau,
                      const Limits& limits) {
  check_measure(mu, dists, d0);
  if (dists.size() > 64) throw Error(ErrorKind::GuardExceeded, "at most 64 distributions");
  auto sup = supported(mu);
  const std::size_t ns = sup.idx.size();
  // heaviest prefix in decreasing gap order whose mu-average gap exceeds tau
  auto best_prefix = [&](const std::vector<double>& val, double v0, Subset* chosen) {
    double r0 = sqrt0(v0);
    std::vector<std::pair<double, std::size_t>> gaps(ns);
    for (std::size_t k = 0; k < ns; ++k) gaps[k] = {std::fabs(sqrt0(val[k]) - r0), k};
    std::sort(gaps.begin(), gaps.end(), [](auto& a, auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    double excess = 0, mass = 0, best = 0;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < ns; ++i) {
      excess += sup.w[gaps[i].second] * (gaps[i].first - tau);
      mass += sup.w[gaps[i].second];
      if (excess >= kStrictSlack * mass && mass > best) {
        best = mass;
        best_len = i + 1;
      }
    }
    if (chosen) {
      *chosen = 0;
      for (std::size_t i = 0; i < best_len; ++i) *chosen |= Subset{1} << sup.idx[gaps[i].second];
    }
    return best;
  };
  auto rep = unit_query_search(dists, sup.idx, d0, limits,
                               [&](const std::vector<double>& val, double v0) { return best_prefix(val, v0, nullptr); });
  std::vector<double> val(ns);
  for (std::size_t k = 0; k < ns; ++k) val[k] = dot(dists[sup.idx[k]].span(), rep.query);
  best_prefix(val, dot(d0.span(), rep.query), &rep.subset);
  return rep;
}

}  // namespace sqlab
