#include "sqlab/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "sqlab/norms.hpp"

namespace sqlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

DimensionReport infinite(std::string quantity, std::size_t witness) {
  DimensionReport r;
  r.quantity = std::move(quantity);
  r.value = r.lower = r.upper = kInf;
  r.uncoverable = witness;
  return r;
}
}  // namespace

std::vector<Distribution> reference_candidates(const ProblemSpec& p, const std::vector<Distribution>& extra) {
  std::vector<Distribution> out{Distribution::uniform(p.domain), uniform_mixture(p.dists)};
  if (p.reference) out.push_back(*p.reference);
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

DimensionReport rsd_from_family(const CoverFamily& family, Subset ground) {
  DimensionReport r;
  r.quantity = "rsd";
  r.exactness = family.exactness == Exactness::Exact ? Exactness::Exact : Exactness::UpperBound;
  if (!ground) {
    r.note = "no distribution left to reject; zero queries";
    return r;
  }
  auto fc = fractional_cover(family, ground);
  if (!fc.finite()) {
    auto inf = infinite("rsd", fc.uncoverable);
    inf.exactness = r.exactness;
    if (r.exactness == Exactness::UpperBound) inf.lower = 1;
    return inf;
  }
  auto cd = cover_dual(family, ground);
  r.value = fc.value;
  r.dual_value = 1.0 / cd.value;
  r.measure = cd.mu;
  for (std::size_t k = 0; k < family.sets.size(); ++k)
    if (fc.q[k] > 0) {
      r.queries.push_back(family.witnesses[k]);
      r.query_weights.push_back(fc.q[k]);
      r.subsets.push_back(family.sets[k] & ground);
    }
  r.upper = r.value;
  r.lower = r.exactness == Exactness::Exact ? r.value : 1.0;
  return r;
}

DimensionReport rsd_decision(const std::vector<Distribution>& dists, const Distribution& d0, double tau, Kappa kappa,
                             const Limits& limits) {
  auto fam = achievable_subsets(dists, d0, tau, kappa, limits);
  auto r = rsd_from_family(fam, full_set(dists.size()));
  r.quantity = std::string("rsd_") + kappa_name(kappa);
  r.reference = d0.weights();
  return r;
}

DimensionReport sd_decision(const std::vector<Distribution>& dists, const Distribution& d0, double tau, Kappa kappa,
                            const Limits& limits) {
  const std::size_t m = dists.size();
  if (m > 16) throw Error(ErrorKind::GuardExceeded, "sd_decision needs |dists| <= 16");
  auto fam = achievable_subsets(dists, d0, tau, kappa, limits);
  Subset cov = fam.coverable();
  for (std::size_t i = 0; i < m; ++i)
    if (!(cov >> i & 1)) return infinite(std::string("sd_") + kappa_name(kappa), i);
  DimensionReport r;
  r.quantity = std::string("sd_") + kappa_name(kappa);
  r.exactness = kappa == Kappa::K1 ? Exactness::Exact : Exactness::UpperBound;
  r.reference = d0.weights();
  Subset best_t = 0;
  for (Subset t = 1; t <= full_set(m); ++t) {
    int hit = 0;
    for (auto s : fam.sets) hit = std::max(hit, popcount(s & t));
    double v = static_cast<double>(popcount(t)) / hit;
    if (v > r.value + 1e-12) {
      r.value = v;
      best_t = t;
    }
  }
  r.subsets = {best_t};
  r.measure.assign(m, 0.0);
  for (auto i : members(best_t)) r.measure[i] = 1.0 / popcount(best_t);
  r.upper = r.value;
  r.lower = r.exactness == Exactness::Exact ? r.value : 1.0;
  return r;
}

DimensionReport det_cover(const std::vector<Distribution>& dists, const Distribution& d0, double tau, CoverMode mode,
                          const Limits& limits) {
  const std::size_t m = dists.size();
  auto fam = achievable_subsets(dists, d0, tau, Kappa::K1, limits);
  Subset all = full_set(m), cov = fam.coverable();
  for (std::size_t i = 0; i < m; ++i)
    if (!(cov >> i & 1)) return infinite(mode == CoverMode::Exact ? "det_cover" : "greedy_cover", i);
  std::vector<std::size_t> chosen;
  if (mode == CoverMode::Greedy) {
    Subset left = all;
    while (left) {
      std::size_t best = 0;
      int gain = -1;
      for (std::size_t k = 0; k < fam.sets.size(); ++k)
        if (popcount(fam.sets[k] & left) > gain) gain = popcount(fam.sets[k] & left), best = k;
      chosen.push_back(best);
      left &= ~fam.sets[best];
    }
  } else {
    if (m > 20) throw Error(ErrorKind::GuardExceeded, "exact cover needs |dists| <= 20");
    std::vector<std::size_t> cur;
    std::size_t best_size = m + 1;
    std::function<void(Subset)> go = [&](Subset left) {
      if (!left) {
        if (cur.size() < best_size) best_size = cur.size(), chosen = cur;
        return;
      }
      if (cur.size() + 1 >= best_size) return;
      std::size_t e = static_cast<std::size_t>(__builtin_ctzll(left));
      for (std::size_t k = 0; k < fam.sets.size(); ++k) {
        if (!(fam.sets[k] >> e & 1)) continue;
        cur.push_back(k);
        go(left & ~fam.sets[k]);
        cur.pop_back();
      }
    };
    go(all);
  }
  DimensionReport r;
  r.quantity = mode == CoverMode::Exact ? "det_cover" : "greedy_cover";
  r.exactness = mode == CoverMode::Exact ? Exactness::Exact : Exactness::UpperBound;
  r.value = static_cast<double>(chosen.size());
  r.upper = r.value;
  r.lower = r.exactness == Exactness::Exact ? r.value : 1.0;
  r.reference = d0.weights();
  for (auto k : chosen) {
    r.queries.push_back(fam.witnesses[k]);
    r.subsets.push_back(fam.sets[k]);
  }
  return r;
}

DimensionReport rand_to_det(const CoverFamily& family, const std::vector<double>& q, double d, double delta,
                            const Measure& mu, Rng& rng) {
  if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0,1)");
  if (q.size() != family.sets.size() || mu.size() != family.ground)
    throw Error(ErrorKind::InvalidArgument, "rand_to_det: size mismatch");
  const auto s = static_cast<std::size_t>(std::ceil(d * std::log(1.0 / delta) - 1e-12));
  auto cdf = cumulative(q);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<std::size_t> picks;
    Subset covered = 0;
    for (std::size_t i = 0; i < std::max<std::size_t>(s, 1); ++i) {
      auto k = sample_index(cdf, rng);
      picks.push_back(k);
      covered |= family.sets[k];
    }
    double mass = 0;
    for (auto i : members(covered)) mass += mu[i];
    if (mass + kNormTol < 1.0 - delta) continue;
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    DimensionReport r;
    r.quantity = "rand_to_det";
    r.exactness = Exactness::UpperBound;
    r.value = static_cast<double>(picks.size());
    r.upper = r.value;
    r.lower = 0;
    for (auto k : picks) {
      r.queries.push_back(family.witnesses[k]);
      r.subsets.push_back(family.sets[k]);
    }
    r.measure = mu.weights();
    r.note = "samples=" + std::to_string(s) + " attempts=" + std::to_string(attempt + 1) +
             " covered_mass=" + std::to_string(mass);
    return r;
  }
  throw Error(ErrorKind::VerificationFailed, "rand_to_det: no sampled cover reached 1-delta in 100 draws");
}

namespace {

std::vector<std::vector<double>> solution_measures(const ProblemSpec& p, double alpha) {
  const std::size_t nf = p.solutions.size();
  std::vector<std::vector<double>> out;
  for (std::size_t f = 0; f < nf; ++f) {
    std::vector<double> w(nf, 0.0);
    w[f] = 1.0;
    out.push_back(std::move(w));
  }
  if (alpha < 1.0) {
    if (nf > 1) out.emplace_back(nf, 1.0 / static_cast<double>(nf));
    if (nf <= 64)
      for (std::size_t a = 0; a < nf; ++a)
        for (std::size_t b = a + 1; b < nf; ++b) {
          std::vector<double> w(nf, 0.0);
          w[a] = w[b] = 0.5;
          out.push_back(std::move(w));
        }
  }
  return out;
}

Subset solved_mask(const ProblemSpec& p, const std::vector<double>& pm, double alpha) {
  Subset z = 0;
  for (std::size_t d = 0; d < p.dists.size(); ++d) {
    double mass = 0;
    for (std::size_t f = 0; f < p.solutions.size(); ++f)
      if (p.validity[f][d]) mass += pm[f];
    if (mass >= alpha - 1e-12) z |= Subset{1} << d;
  }
  return z;
}

}  // namespace

DimensionReport rsd_search(const ProblemSpec& p, double tau, double alpha, const std::vector<Distribution>& candidates,
                           const Limits& limits) {
  if (!(alpha > 0 && alpha <= 1)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1]");
  if (candidates.empty()) throw Error(ErrorKind::InvalidArgument, "no reference candidates");
  if (p.dists.size() > 64) throw Error(ErrorKind::GuardExceeded, "at most 64 distributions");
  const Subset all = full_set(p.dists.size());
  auto pms = solution_measures(p, alpha);
  DimensionReport best;
  best.value = -1;
  std::string skipped;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    std::optional<CoverFamily> famo;
    try {
      famo = achievable_subsets(p.dists, candidates[c], tau, Kappa::K1, limits);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::GuardExceeded) throw;
      skipped += " " + std::to_string(c);
      continue;
    }
    const auto& fam = *famo;
    DimensionReport inner;
    inner.value = kInf;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < pms.size(); ++k) {
      auto r = rsd_from_family(fam, all & ~solved_mask(p, pms[k], alpha));
      if (r.value < inner.value || k == 0) {
        inner = std::move(r);
        arg = k;
      }
    }
    if (inner.value > best.value) {
      best = std::move(inner);
      best.reference = candidates[c].weights();
      best.note = "reference candidate " + std::to_string(c) + ", solution measure " + std::to_string(arg);
    }
  }
  if (best.value < 0) throw Error(ErrorKind::GuardExceeded, "rsd_search: every reference candidate exceeded the LP budget");
  if (!skipped.empty()) best.note += "; skipped candidates (LP budget):" + skipped;
  best.quantity = "rsd_search";
  best.exactness = alpha >= 1.0 ? Exactness::LowerBound : Exactness::Approximate;
  best.lower = alpha >= 1.0 ? best.value : 0.0;
  best.upper = kInf;
  return best;
}

DimensionReport sd_search(const ProblemSpec& p, double tau, const std::vector<Distribution>& candidates,
                          const Limits& limits) {
  auto r = rsd_search(p, tau, 1.0, candidates, limits);
  r.quantity = "sd_search";
  return r;
}

DimensionReport rsd_verifiable(const ProblemSpec& p, double theta, double tau,
                               const std::vector<Distribution>& candidates, const Limits& limits) {
  DimensionReport best;
  best.value = -1;
  for (const auto& c : candidates) {
    if (!p.in_unsolved_region(c, theta)) continue;
    auto r = rsd_decision(p.dists, c, tau, Kappa::K1, limits);
    if (r.value > best.value) best = std::move(r);
  }
  if (best.value < 0) throw Error(ErrorKind::Infeasible, "no reference candidate has D0[phi_f] > theta for every f");
  best.quantity = "rsd_verifiable";
  best.exactness = Exactness::LowerBound;
  best.lower = best.value;
  best.upper = kInf;
  return best;
}

DimensionReport rsd_optimizing(const ProblemSpec& p, double eps, double tau, const std::vector<double>& theta_grid,
                               const std::vector<Distribution>& candidates, const Limits& limits) {
  if (p.dists.size() > 64) throw Error(ErrorKind::GuardExceeded, "at most 64 distributions");
  std::vector<std::optional<CoverFamily>> fams(candidates.size());
  DimensionReport best;
  best.value = -1;
  for (double theta : theta_grid) {
    Subset rest = 0;
    for (std::size_t d = 0; d < p.dists.size(); ++d)
      for (const auto& q : p.verify)
        if (expectation(p.dists[d], *q) <= theta) {
          rest |= Subset{1} << d;
          break;
        }
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (!p.in_unsolved_region(candidates[c], theta + eps)) continue;
      if (!fams[c]) fams[c] = achievable_subsets(p.dists, candidates[c], tau, Kappa::K1, limits);
      auto r = rsd_from_family(*fams[c], rest);
      if (r.value > best.value) {
        best = std::move(r);
        best.reference = candidates[c].weights();
        best.note = "theta=" + std::to_string(theta);
      }
    }
  }
  if (best.value < 0) throw Error(ErrorKind::Infeasible, "no (theta, D0) pair with D0 in D_{theta+eps}");
  best.quantity = "rsd_optimizing";
  best.exactness = Exactness::LowerBound;
  best.lower = best.value;
  best.upper = kInf;
  return best;
}

DimensionReport crsd(const std::vector<Distribution>& dists, const Distribution& d0, Kappa kappa, const Limits& limits) {
  const std::size_t nx = d0.size(), m = dists.size();
  if (nx > std::min<std::size_t>(limits.max_domain, 20)) throw Error(ErrorKind::GuardExceeded, "crsd needs |X| <= 20");
  for (const auto& d : dists)
    if (d.weights() == d0.weights()) throw Error(ErrorKind::InvalidArgument, "crsd: the reference is one of the distributions");
  auto deltas = deltas_from(dists, d0);
  std::vector<std::vector<double>> a;
  std::vector<std::vector<double>> verts;
  if (kappa == Kappa::K1) {
    const std::uint64_t rows = std::uint64_t{1} << (nx - 1);
    for (std::uint64_t b = 0; b < rows; ++b) {
      std::vector<double> sigma(nx, -1.0);
      sigma[0] = 1.0;
      for (std::size_t x = 1; x < nx; ++x)
        if (b >> (x - 1) & 1) sigma[x] = 1.0;
      std::vector<double> row(m);
      for (std::size_t i = 0; i < m; ++i) row[i] = std::fabs(dot(sigma, deltas[i]));
      a.push_back(std::move(row));
      verts.push_back(std::move(sigma));
    }
  } else {
    const std::uint64_t rows = std::uint64_t{1} << nx;
    for (std::uint64_t b = 0; b < rows; ++b) {
      std::vector<double> sigma(nx, 0.0);
      for (std::size_t x = 0; x < nx; ++x)
        if (b >> x & 1) sigma[x] = 1.0;
      double r0 = std::sqrt(std::max(dot(d0.span(), sigma), 0.0));
      std::vector<double> row(m);
      for (std::size_t i = 0; i < m; ++i) row[i] = std::fabs(std::sqrt(std::max(dot(dists[i].span(), sigma), 0.0)) - r0);
      a.push_back(std::move(row));
      verts.push_back(std::move(sigma));
    }
  }
  auto g = zero_sum(a);
  DimensionReport r;
  r.quantity = std::string("crsd_") + kappa_name(kappa);
  r.reference = d0.weights();
  r.measure = g.col;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (g.row[k] > 1e-12) {
      r.queries.push_back(verts[k]);
      r.query_weights.push_back(g.row[k]);
    }
  if (g.value <= 1e-14) {
    for (std::size_t i = 0; i < m; ++i)
      if (l1_distance(dists[i].span(), d0.span()) <= 1e-14) r.uncoverable = i;
    r.value = r.lower = r.upper = kInf;
    return r;
  }
  r.value = 1.0 / g.value;
  Measure mu(std::vector<double>(g.col));
  if (kappa == Kappa::K1) {
    r.exactness = Exactness::Exact;
    r.lower = r.upper = r.value;
    if (nx <= limits.max_domain || m <= limits.max_sign_dists) r.dual_value = 1.0 / kbar1(mu, dists, d0, limits).value;
  } else {
    r.exactness = Exactness::UpperBound;
    r.upper = r.value;
    double ub = std::sqrt(kbar1(mu, dists, d0, limits).value / 2.0);
    if (m <= limits.max_sign_dists) ub = std::min(ub, kbar2(mu, dists, d0, limits).value);
    r.lower = ub > 0 ? 1.0 / ub : kInf;
    r.note = "vertex payoffs bound the value from above; lower end from kbar2 and kbar1 at the game measure";
  }
  return r;
}

bool CombinedAudit::all_hold() const {
  return std::all_of(rows.begin(), rows.end(), [](const RelationRow& r) { return r.holds; });
}

CombinedAudit combined_relation_audit(const std::vector<Distribution>& dists, const Distribution& d0,
                                      const Limits& limits) {
  CombinedAudit out;
  if (dists.empty()) return out;
  auto c = crsd(dists, d0, Kappa::K1, limits);
  out.d = c.value;
  if (!std::isfinite(out.d)) return out;
  const double d = out.d;
  {
    double tau = 1.0 / (3.0 * d);
    double v = rsd_decision(dists, d0, tau, Kappa::K1, limits).value;
    out.rows.push_back({tau, v, 3.0 * d, "<=", v <= 3.0 * d * (1 + 1e-9)});
  }
  for (double tau : {1.0 / (2.0 * d), 1.0 / d}) {
    double v = rsd_decision(dists, d0, tau, Kappa::K1, limits).value;
    out.rows.push_back({tau, v, d * tau, ">", v > d * tau});
  }
  return out;
}

double simple_lower_bound(const Measure& mu, const Distribution& d0, double tau, double beta, const ProblemSpec& p,
                          const Limits& limits) {
  if (mu.size() != p.dists.size()) throw Error(ErrorKind::InvalidArgument, "measure must be over problem distributions");
  double solved = 0;
  for (std::size_t f = 0; f < p.solutions.size(); ++f) {
    double s = 0;
    for (auto d : p.solved_by(f)) s += mu[d];
    solved = std::max(solved, s);
  }
  double num = beta - solved;
  double frac = kappa1_frac(mu, p.dists, d0, tau, limits).value;
  if (frac <= 0) return num > 0 ? kInf : 0.0;
  return std::max(num, 0.0) / frac;
}

}  // namespace sqlab
