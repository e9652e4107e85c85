#include "sqlab/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "sqlab/lp.hpp"

namespace sqlab {

const char* kappa_name(Kappa k) { return k == Kappa::K1 ? "k1" : "kv"; }

const char* exactness_name(Exactness e) {
  switch (e) {
    case Exactness::Exact: return "EXACT";
    case Exactness::LowerBound: return "LOWER_BOUND";
    case Exactness::UpperBound: return "UPPER_BOUND";
    case Exactness::Approximate: return "APPROXIMATE";
  }
  return "?";
}

std::vector<std::size_t> members(Subset s) {
  std::vector<std::size_t> out;
  while (s) {
    out.push_back(static_cast<std::size_t>(__builtin_ctzll(s)));
    s &= s - 1;
  }
  return out;
}

std::vector<std::vector<double>> deltas_from(const std::vector<Distribution>& dists, const Distribution& d0) {
  std::vector<std::vector<double>> out;
  out.reserve(dists.size());
  for (const auto& d : dists) {
    require_same_domain(d.domain(), d0.domain(), "distribution vs reference");
    out.push_back(difference(d.span(), d0.span()));
  }
  return out;
}

MarginResult max_margin(const std::vector<std::vector<double>>& deltas, Subset s, Subset signs) {
  MarginResult r;
  if (!s) {
    r.margin = std::numeric_limits<double>::infinity();
    return r;
  }
  const std::size_t nx = deltas.at(members(s).front()).size();
  if (popcount(s) == 1) {
    std::size_t i = members(s).front();
    double sg = (signs >> i) & 1 ? -1.0 : 1.0;
    r.phi.resize(nx);
    for (std::size_t x = 0; x < nx; ++x) {
      double v = sg * deltas[i][x];
      r.phi[x] = v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
      r.margin += std::fabs(v);
    }
    return r;
  }
  lp::Program p(nx + 1);
  for (std::size_t x = 0; x < nx; ++x) {
    p.lower[x] = -1;
    p.upper[x] = 1;
  }
  p.free_var(nx);
  p.objective[nx] = 1;
  for (std::size_t i : members(s)) {
    double sg = (signs >> i) & 1 ? -1.0 : 1.0;
    std::vector<double> row(nx + 1);
    for (std::size_t x = 0; x < nx; ++x) row[x] = sg * deltas[i][x];
    row[nx] = -1;
    p.add(std::move(row), lp::Sense::GreaterEqual, 0.0);
  }
  auto sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal) throw Error(ErrorKind::Infeasible, "max_margin LP failed");
  r.margin = sol.value;
  r.phi.assign(sol.x.begin(), sol.x.begin() + static_cast<long>(nx));
  for (double& v : r.phi) v = std::clamp(v, -1.0, 1.0);
  return r;
}

Subset CoverFamily::coverable() const {
  Subset u = 0;
  for (auto s : sets) u |= s;
  return u;
}

static void keep_maximal(std::vector<Subset>& sets, std::vector<std::vector<double>>& wit) {
  std::vector<std::size_t> order(sets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return popcount(sets[a]) > popcount(sets[b]); });
  std::vector<Subset> out;
  std::vector<std::vector<double>> wout;
  for (auto i : order) {
    Subset s = sets[i];
    if (!s) continue;
    bool dominated = false;
    for (auto t : out)
      if ((s & t) == s) {
        dominated = true;
        break;
      }
    if (dominated) continue;
    out.push_back(s);
    wout.push_back(std::move(wit[i]));
  }
  sets = std::move(out);
  wit = std::move(wout);
}

CoverFamily CoverFamily::restricted(Subset ground_mask) const {
  CoverFamily f = *this;
  for (auto& s : f.sets) s &= ground_mask;
  keep_maximal(f.sets, f.witnesses);
  return f;
}

namespace {

struct PatternEntry {
  Subset pattern;
  std::vector<double> phi;
};

Subset normalize(Subset pattern, Subset s) {
  if (!s) return 0;
  Subset low = s & (~s + 1);
  return (pattern & low) ? (pattern ^ s) & s : pattern & s;
}

double signed_gain(const std::vector<double>& phi, const std::vector<double>& delta, double sign) {
  return sign * dot(phi, delta);
}

CoverFamily achievable_k1(const std::vector<std::vector<double>>& deltas, double tau, const Limits& limits) {
  const std::size_t m = deltas.size();
  const double need = tau + kStrictSlack;
  CoverFamily fam;
  fam.ground = m;
  fam.kappa = Kappa::K1;
  fam.tau = tau;
  // a sign query covering everything settles the family without enumeration
  {
    std::vector<std::vector<double>> trial;
    std::vector<double> sum(deltas.empty() ? 0 : deltas[0].size(), 0.0);
    for (const auto& d : deltas) {
      std::vector<double> phi(d.size());
      for (std::size_t x = 0; x < d.size(); ++x) {
        phi[x] = d[x] >= 0 ? 1.0 : -1.0;
        sum[x] += d[x];
      }
      trial.push_back(std::move(phi));
    }
    std::vector<double> phi(sum.size());
    for (std::size_t x = 0; x < sum.size(); ++x) phi[x] = sum[x] >= 0 ? 1.0 : -1.0;
    trial.push_back(std::move(phi));
    for (auto& t : trial) {
      bool all = m > 0;
      for (const auto& d : deltas)
        if (std::fabs(dot(t, d)) < need) {
          all = false;
          break;
        }
      if (all) {
        fam.sets.push_back(full_set(m));
        fam.witnesses.push_back(std::move(t));
        return fam;
      }
    }
  }
  std::unordered_map<Subset, std::vector<PatternEntry>> table;
  std::vector<Subset> level;
  for (std::size_t i = 0; i < m; ++i) {
    auto r = max_margin(deltas, Subset{1} << i, 0);
    if (r.margin >= need) {
      table[Subset{1} << i].push_back({0, std::move(r.phi)});
      level.push_back(Subset{1} << i);
    }
  }
  while (!level.empty()) {
    std::vector<Subset> next;
    for (Subset a : level) {
      int top = 63 - __builtin_clzll(a);
      for (std::size_t j = static_cast<std::size_t>(top) + 1; j < m; ++j) {
        Subset s = a | (Subset{1} << j);
        bool all_sub = true;
        for (auto i : members(s))
          if (!table.count(s & ~(Subset{1} << i))) {
            all_sub = false;
            break;
          }
        if (!all_sub) continue;
        std::vector<PatternEntry> found;
        const auto& base = table.at(a);
        for (const auto& pe : base) {
          for (int sj = 0; sj < 2; ++sj) {
            Subset pat = pe.pattern | (sj ? (Subset{1} << j) : 0);
            bool ok = true;
            for (auto i : members(s)) {
              Subset sub = s & ~(Subset{1} << i);
              Subset np = normalize(pat, sub);
              const auto& lst = table.at(sub);
              if (std::none_of(lst.begin(), lst.end(), [&](const PatternEntry& e) { return e.pattern == np; })) {
                ok = false;
                break;
              }
            }
            if (!ok) continue;
            // the parent witness may already separate the new element
            if (signed_gain(pe.phi, deltas[j], sj ? -1.0 : 1.0) >= need) {
              found.push_back({pat, pe.phi});
              continue;
            }
            if (++fam.lp_calls > limits.max_lp_calls)
              throw Error(ErrorKind::GuardExceeded, "achievable_subsets: LP budget exhausted");
            auto r = max_margin(deltas, s, pat);
            if (r.margin >= need) found.push_back({pat, std::move(r.phi)});
          }
        }
        if (!found.empty()) {
          table.emplace(s, std::move(found));
          next.push_back(s);
        }
      }
    }
    level = std::move(next);
  }
  for (const auto& [s, lst] : table) {
    bool maximal = true;
    for (std::size_t j = 0; j < m && maximal; ++j)
      if (!(s >> j & 1) && table.count(s | (Subset{1} << j))) maximal = false;
    if (maximal) {
      fam.sets.push_back(s);
      fam.witnesses.push_back(lst.front().phi);
    }
  }
  // deterministic order: larger first, then by mask
  std::vector<std::size_t> order(fam.sets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) {
    int px = popcount(fam.sets[x]), py = popcount(fam.sets[y]);
    return px != py ? px > py : fam.sets[x] < fam.sets[y];
  });
  CoverFamily sorted = fam;
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.sets[i] = fam.sets[order[i]];
    sorted.witnesses[i] = fam.witnesses[order[i]];
  }
  return sorted;
}

CoverFamily achievable_kv(const std::vector<Distribution>& dists, const Distribution& d0, double tau,
                          const Limits& limits) {
  const std::size_t m = dists.size(), nx = d0.size();
  if (nx > limits.max_domain) throw Error(ErrorKind::GuardExceeded, "vertex enumeration needs |X| <= " + std::to_string(limits.max_domain));
  const double need = tau + kStrictSlack;
  std::vector<double> val(m, 0.0);
  double v0 = 0;
  std::unordered_map<Subset, std::uint64_t> seen;
  const std::uint64_t total = std::uint64_t{1} << nx;
  std::uint64_t gray = 0;
  for (std::uint64_t k = 0; k < total; ++k) {
    if (k) {
      std::uint64_t g = k ^ (k >> 1);
      std::size_t x = static_cast<std::size_t>(__builtin_ctzll(g ^ gray));
      double sg = (g >> x & 1) ? 1.0 : -1.0;
      for (std::size_t i = 0; i < m; ++i) val[i] += sg * dists[i][x];
      v0 += sg * d0[x];
      gray = g;
    }
    Subset s = 0;
    double r0 = std::sqrt(std::max(v0, 0.0));
    for (std::size_t i = 0; i < m; ++i)
      if (std::fabs(std::sqrt(std::max(val[i], 0.0)) - r0) >= need) s |= Subset{1} << i;
    if (s) seen.emplace(s, gray);
  }
  CoverFamily fam;
  fam.ground = m;
  fam.kappa = Kappa::KV;
  fam.tau = tau;
  fam.exactness = Exactness::LowerBound;  // the family under-approximates achievable sets
  for (const auto& [s, g] : seen) {
    fam.sets.push_back(s);
    std::vector<double> phi(nx);
    for (std::size_t x = 0; x < nx; ++x) phi[x] = (g >> x & 1) ? 1.0 : 0.0;
    fam.witnesses.push_back(std::move(phi));
  }
  std::vector<std::size_t> order(fam.sets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fam.sets[a] < fam.sets[b]; });
  std::vector<Subset> sets;
  std::vector<std::vector<double>> wit;
  for (auto i : order) {
    sets.push_back(fam.sets[i]);
    wit.push_back(fam.witnesses[i]);
  }
  keep_maximal(sets, wit);
  fam.sets = std::move(sets);
  fam.witnesses = std::move(wit);
  return fam;
}

}  // namespace

CoverFamily achievable_subsets(const std::vector<Distribution>& dists, const Distribution& d0, double tau, Kappa kappa,
                               const Limits& limits) {
  if (dists.size() > limits.max_dists || dists.size() > 64)
    throw Error(ErrorKind::GuardExceeded, "achievable_subsets needs |dists| <= " + std::to_string(limits.max_dists));
  if (!(tau >= 0)) throw Error(ErrorKind::InvalidArgument, "tau must be nonnegative");
  if (kappa == Kappa::K1) return achievable_k1(deltas_from(dists, d0), tau, limits);
  for (const auto& d : dists) require_same_domain(d.domain(), d0.domain(), "achievable_subsets");
  return achievable_kv(dists, d0, tau, limits);
}

FractionalCover fractional_cover(const CoverFamily& family, Subset ground_mask) {
  FractionalCover fc;
  Subset cov = family.coverable();
  for (auto i : members(ground_mask))
    if (!(cov >> i & 1)) {
      fc.uncoverable = i;
      fc.value = std::numeric_limits<double>::infinity();
      return fc;
    }
  fc.q.assign(family.sets.size(), 0.0);
  if (!ground_mask) return fc;
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < family.sets.size(); ++k)
    if (family.sets[k] & ground_mask) cols.push_back(k);
  lp::Program p(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) p.objective[c] = -1.0;
  for (auto i : members(ground_mask)) {
    std::vector<double> row(cols.size(), 0.0);
    for (std::size_t c = 0; c < cols.size(); ++c) row[c] = (family.sets[cols[c]] >> i & 1) ? 1.0 : 0.0;
    p.add(std::move(row), lp::Sense::GreaterEqual, 1.0);
  }
  auto sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal) throw Error(ErrorKind::Infeasible, "fractional cover LP failed");
  fc.value = -sol.value;
  for (std::size_t c = 0; c < cols.size(); ++c) fc.q[cols[c]] = std::max(sol.x[c], 0.0) / fc.value;
  return fc;
}

CoverDual cover_dual(const CoverFamily& family, Subset ground_mask) {
  auto elems = members(ground_mask);
  CoverDual cd;
  cd.mu.assign(family.ground, 0.0);
  if (elems.empty()) return cd;
  const std::size_t n = elems.size();
  lp::Program p(n + 1);
  p.free_var(n);
  p.objective[n] = -1.0;
  for (auto s : family.sets) {
    if (!(s & ground_mask)) continue;
    std::vector<double> row(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) row[k] = (s >> elems[k] & 1) ? 1.0 : 0.0;
    row[n] = -1.0;
    p.add(std::move(row), lp::Sense::LessEqual, 0.0);
  }
  std::vector<double> sum(n + 1, 1.0);
  sum[n] = 0.0;
  p.add(std::move(sum), lp::Sense::Equal, 1.0);
  auto sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal) throw Error(ErrorKind::Infeasible, "cover dual LP failed");
  cd.value = -sol.value;
  for (std::size_t k = 0; k < n; ++k) cd.mu[elems[k]] = std::max(sol.x[k], 0.0);
  return cd;
}

GameValue zero_sum(const std::vector<std::vector<double>>& a) {
  if (a.empty() || a[0].empty()) throw Error(ErrorKind::InvalidArgument, "empty payoff matrix");
  const std::size_t r = a.size(), c = a[0].size();
  lp::Program p(r + 1);
  p.free_var(r);
  p.objective[r] = 1.0;
  for (std::size_t j = 0; j < c; ++j) {
    std::vector<double> row(r + 1);
    for (std::size_t i = 0; i < r; ++i) row[i] = a[i].at(j);
    row[r] = -1.0;
    p.add(std::move(row), lp::Sense::GreaterEqual, 0.0);
  }
  std::vector<double> sum(r + 1, 1.0);
  sum[r] = 0.0;
  p.add(std::move(sum), lp::Sense::Equal, 1.0);
  auto sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal) throw Error(ErrorKind::Infeasible, "zero-sum LP failed");
  GameValue g;
  g.value = sol.value;
  g.row.assign(sol.x.begin(), sol.x.begin() + static_cast<long>(r));
  g.col.resize(c);
  double s = 0;
  for (std::size_t j = 0; j < c; ++j) s += (g.col[j] = std::max(-sol.duals[j], 0.0));
  if (s > 0)
    for (double& y : g.col) y /= s;
  for (double& x : g.row) x = std::max(x, 0.0);
  return g;
}

double zero_sum_min_side(const std::vector<std::vector<double>>& a) {
  const std::size_t r = a.size(), c = a.at(0).size();
  lp::Program p(c + 1);
  p.free_var(c);
  p.objective[c] = -1.0;
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<double> row(a[i]);
    row.push_back(-1.0);
    p.add(std::move(row), lp::Sense::LessEqual, 0.0);
  }
  std::vector<double> sum(c + 1, 1.0);
  sum[c] = 0.0;
  p.add(std::move(sum), lp::Sense::Equal, 1.0);
  auto sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal) throw Error(ErrorKind::Infeasible, "zero-sum LP failed");
  return -sol.value;
}

}  // namespace sqlab
