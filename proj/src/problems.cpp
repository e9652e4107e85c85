#include "sqlab/problems.hpp"

#include <algorithm>
#include <cmath>

#include "sqlab/norms.hpp"

namespace sqlab {

DomainPtr cube_domain(std::size_t n) {
  if (n == 0 || n > 20) throw Error(ErrorKind::GuardExceeded, "cube tables need 1 <= n <= 20");
  std::vector<std::string> ids(std::size_t{1} << n);
  for (std::size_t x = 0; x < ids.size(); ++x) {
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i)
      if (x >> i & 1) s[i] = '1';
    ids[x] = std::move(s);
  }
  return FiniteDomain::make(std::move(ids));
}

std::vector<Subset> k_subsets(std::size_t n, std::size_t k) {
  std::vector<Subset> out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return out;
  for (;;) {
    Subset s = 0;
    for (auto i : idx) s |= Subset{1} << i;
    out.push_back(s);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::string subset_name(Subset s) {
  std::string out = "{";
  bool first = true;
  for (auto i : members(s)) {
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

Distribution biclique_distribution(const DomainPtr& cube, std::size_t n, std::size_t k, Subset planted) {
  if (cube->size() != (std::size_t{1} << n)) throw Error(ErrorKind::DomainMismatch, "cube size");
  if (static_cast<std::size_t>(popcount(planted)) != k) throw Error(ErrorKind::InvalidArgument, "planted set must have k elements");
  const double q = static_cast<double>(k) / static_cast<double>(n);
  const double base = (1 - q) / static_cast<double>(cube->size());
  const double bump = q / static_cast<double>(std::size_t{1} << (n - k));
  std::vector<double> w(cube->size());
  for (std::size_t x = 0; x < w.size(); ++x) w[x] = base + ((x & planted) == planted ? bump : 0.0);
  return Distribution(cube, std::move(w));
}

double biclique_conjunction(std::size_t n, std::size_t k, Subset planted, Subset t) {
  const double q = static_cast<double>(k) / static_cast<double>(n);
  return (1 - q) * std::ldexp(1.0, -popcount(t)) + q * std::ldexp(1.0, -popcount(t & ~planted));
}

double biclique_parity(std::size_t n, std::size_t k, Subset planted, Subset t) {
  const double q = static_cast<double>(k) / static_cast<double>(n);
  if (!t) return 1.0;
  if ((t & planted) != t) return 0.0;
  return q * ((popcount(t) & 1) ? -1.0 : 1.0);
}

QueryFn conjunction_query(const DomainPtr& cube, Subset t) {
  std::vector<double> v(cube->size());
  for (std::size_t x = 0; x < v.size(); ++x) v[x] = (x & t) == t ? 1.0 : 0.0;
  return QueryFn(cube, std::move(v), QueryRange::Unit);
}

BicliqueFamily biclique_family(std::size_t n, std::size_t k) {
  if (n > 12) throw Error(ErrorKind::GuardExceeded, "explicit bi-clique tables need n <= 12");
  if (k == 0 || k > n) throw Error(ErrorKind::InvalidArgument, "need 1 <= k <= n");
  BicliqueFamily fam;
  fam.n = n;
  fam.k = k;
  fam.planted = k_subsets(n, k);
  auto cube = cube_domain(n);
  std::vector<Distribution> dists;
  std::vector<std::string> names;
  for (auto s : fam.planted) {
    dists.push_back(biclique_distribution(cube, n, k, s));
    names.push_back(subset_name(s));
  }
  const std::string tag = "biclique_n" + std::to_string(n) + "_k" + std::to_string(k);
  const auto m = dists.size();

  auto& dec = fam.decision;
  dec.kind = ProblemKind::Decision;
  dec.name = tag + "_decision";
  dec.domain = cube;
  dec.dists = dists;
  dec.reference = Distribution::uniform(cube);
  dec.solutions = {"alternative", "reference"};
  dec.validity = {std::vector<bool>(m, true), std::vector<bool>(m, false)};

  auto& se = fam.search;
  se.kind = ProblemKind::Search;
  se.name = tag + "_search";
  se.domain = cube;
  se.dists = dists;
  se.reference = Distribution::uniform(cube);
  se.solutions = names;
  se.validity.assign(m, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < m; ++i) se.validity[i][i] = true;

  auto& ve = fam.verifiable;
  ve.kind = ProblemKind::Verifiable;
  ve.name = tag + "_verifiable";
  ve.domain = cube;
  ve.dists = dists;
  ve.reference = Distribution::uniform(cube);
  ve.solutions = names;
  for (auto s : fam.planted) ve.verify.emplace_back(conjunction_query(cube, s));
  ve.threshold = static_cast<double>(k) / static_cast<double>(n);
  ve.derive_validity();
  return fam;
}

LineP::LineP(std::size_t p) : p_(p) {
  if (p < 2) throw Error(ErrorKind::InvalidArgument, "p must be prime");
  for (std::size_t d = 2; d * d <= p; ++d)
    if (p % d == 0) throw Error(ErrorKind::InvalidArgument, "p must be prime");
  std::vector<std::string> ids;
  for (std::size_t z1 = 0; z1 < p; ++z1)
    for (std::size_t z2 = 0; z2 < p; ++z2) ids.push_back(std::to_string(z1) + "," + std::to_string(z2));
  labeled_ = FiniteDomain::labeled(ids);
  base_ = FiniteDomain::make(std::move(ids));
}

bool LineP::on_line(std::size_t line, std::size_t z) const {
  std::size_t a1 = line / p_, a2 = line % p_, z1 = z / p_, z2 = z % p_;
  return (a1 * z1 + a2) % p_ == z2;
}

std::vector<int> LineP::hypothesis(std::size_t line) const {
  std::vector<int> h(num_points());
  for (std::size_t z = 0; z < h.size(); ++z) h[z] = on_line(line, z) ? 1 : -1;
  return h;
}

Distribution LineP::marginal(Marginal m, std::size_t line) const {
  const double pp = static_cast<double>(p_ * p_);
  std::vector<double> w(num_points(), 1.0 / pp);
  if (m == Marginal::Skewed)
    for (std::size_t z = 0; z < w.size(); ++z)
      w[z] = 1.0 / (2 * pp) + (on_line(line, z) ? 1.0 / (2.0 * static_cast<double>(p_)) : 0.0);
  return Distribution(base_, std::move(w));
}

Distribution LineP::target(Marginal m, std::size_t line) const {
  return pac_lift(marginal(m, line), hypothesis(line), labeled_);
}

std::string LineP::line_name(std::size_t line) const {
  return "(" + std::to_string(line / p_) + "," + std::to_string(line % p_) + ")";
}

QueryFn disagreement_query(const DomainPtr& labeled, const std::vector<int>& h) {
  if (!labeled->is_labeled() || h.size() != labeled->base_size()) throw Error(ErrorKind::DomainMismatch, "disagreement query");
  std::vector<double> v(labeled->size(), 0.0);
  for (std::size_t z = 0; z < h.size(); ++z) v[FiniteDomain::labeled_index(z, -h[z])] = 1.0;
  return QueryFn(labeled, std::move(v), QueryRange::Unit);
}

Distribution uniform_label_center(const Distribution& marginal, const DomainPtr& labeled) {
  std::vector<double> w(labeled->size());
  for (std::size_t z = 0; z < marginal.size(); ++z) w[2 * z] = w[2 * z + 1] = marginal[z] / 2;
  return Distribution(labeled, std::move(w));
}

ProblemSpec pac_problem(const DomainPtr& labeled, const std::vector<Distribution>& marginals,
                        const std::vector<std::vector<int>>& concepts, double eps,
                        const std::vector<std::vector<int>>& hypotheses) {
  if (marginals.empty() || concepts.empty()) throw Error(ErrorKind::InvalidArgument, "pac_problem needs marginals and concepts");
  ProblemSpec p;
  p.kind = ProblemKind::Pac;
  p.domain = labeled;
  for (const auto& m : marginals)
    for (const auto& c : concepts) p.dists.push_back(pac_lift(m, c, labeled));
  const auto& hs = hypotheses.empty() ? concepts : hypotheses;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    std::string name;
    for (int b : hs[i]) name += b > 0 ? '+' : '-';
    p.solutions.push_back(name);
    p.verify.emplace_back(disagreement_query(labeled, hs[i]));
  }
  p.threshold = eps;
  p.eps = eps;
  p.reference = uniform_label_center(marginals.front(), labeled);
  p.derive_validity();
  return p;
}

ProblemSpec line_family(std::size_t p, Marginal m, double eps) {
  LineP lp(p);
  ProblemSpec spec;
  spec.kind = ProblemKind::Pac;
  spec.name = "line_p" + std::to_string(p) + (m == Marginal::Skewed ? "_skewed" : "_uniform");
  spec.domain = lp.labeled();
  for (std::size_t a = 0; a < lp.num_lines(); ++a) {
    spec.dists.push_back(lp.target(m, a));
    spec.solutions.push_back(lp.line_name(a));
    spec.verify.emplace_back(disagreement_query(lp.labeled(), lp.hypothesis(a)));
  }
  spec.threshold = eps;
  spec.eps = eps;
  spec.reference = Distribution::uniform(lp.labeled());
  spec.derive_validity();
  return spec;
}

bool LineAudit::passes(double tol) const {
  return same_err <= tol && parallel_err <= tol && other_err <= tol && same <= same_bound + tol &&
         parallel <= parallel_bound + tol && rho <= rho_bound + tol && std::fabs(rho - rho_closed) <= tol &&
         kbar1 <= kbar1_bound + tol;
}

LineAudit line_audit(std::size_t p) {
  LineP lp(p);
  const double pd = static_cast<double>(p);
  std::vector<Distribution> dists;
  for (std::size_t a = 0; a < lp.num_lines(); ++a) dists.push_back(lp.target(Marginal::Skewed, a));
  auto d0 = Distribution::uniform(lp.labeled());
  auto c = correlation_matrix(dists, d0);
  LineAudit r;
  r.p = p;
  const double same = (pd + 1) / 2, par = -(0.5 + 1 / pd), oth = 1 / (pd * pd);
  r.same = std::fabs(c[0][0]);
  r.parallel = std::fabs(c[0][1]);
  r.other = std::fabs(c[0][p]);
  for (std::size_t a = 0; a < dists.size(); ++a)
    for (std::size_t b = 0; b < dists.size(); ++b) {
      if (a == b)
        r.same_err = std::max(r.same_err, std::fabs(c[a][b] - same));
      else if (lp.parallel(a, b))
        r.parallel_err = std::max(r.parallel_err, std::fabs(c[a][b] - par));
      else
        r.other_err = std::max(r.other_err, std::fabs(c[a][b] - oth));
    }
  r.same_bound = pd / 2 + 1;
  r.parallel_bound = 1;
  r.rho = rho(dists, d0);
  r.rho_closed = 1 / pd + 2 * (pd - 1) / (pd * pd * pd);
  r.rho_bound = 2 / pd;
  r.kbar1_bound = 4 * std::sqrt(2 / pd);
  auto mu = Measure::uniform(dists.size());
  Limits lim;
  if (d0.size() <= lim.max_domain || dists.size() <= lim.max_sign_dists) {
    r.kbar1 = kbar1(mu, dists, d0, lim).value;
    r.kbar1_exactness = Exactness::Exact;
  } else {
    // |D[phi]-D0[phi]| averages are bounded by the spectral norm since ||phi||_{D0} <= 1
    r.kbar1 = kbar2_spectral(mu, dists, d0).value;
    r.kbar1_exactness = Exactness::UpperBound;
  }
  return r;
}

}  // namespace sqlab
