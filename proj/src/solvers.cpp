#include "sqlab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sqlab {

MultiplicativeWeights::MultiplicativeWeights(std::vector<double> w1, double gamma)
    : w1_(std::move(w1)), gamma_(gamma) {
  if (!(gamma > 0 && gamma < 1)) throw Error(ErrorKind::InvalidArgument, "gamma must lie in (0,1)");
  Measure check(w1_);
  w_ = w1_;
  expert_.assign(w_.size(), 0.0);
}

void MultiplicativeWeights::update(const std::vector<double>& z) {
  if (z.size() != w_.size()) throw Error(ErrorKind::InvalidArgument, "loss vector length");
  for (double v : z)
    if (!(v >= -1 && v <= 1)) throw Error(ErrorKind::InvalidArgument, "losses must lie in [-1,1]");
  learner_loss_ += dot(w_, z);
  double s = 0;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    expert_[i] += z[i];
    s += (w_[i] *= 1 - gamma_ * z[i]);
  }
  for (double& v : w_) v /= s;
  ++steps_;
}

double MultiplicativeWeights::regret(const std::vector<double>& comparator) const {
  return learner_loss_ - dot(comparator, expert_);
}

double MultiplicativeWeights::best_expert_regret() const {
  return learner_loss_ - *std::min_element(expert_.begin(), expert_.end());
}

MultiplicativeWeights mw_run(std::vector<double> w1, double gamma,
                             const std::function<std::vector<double>(std::size_t)>& loss, std::size_t steps) {
  MultiplicativeWeights mw(std::move(w1), gamma);
  for (std::size_t t = 0; t < steps; ++t) mw.update(loss(t));
  return mw;
}

// ---------------------------------------------------------------- covers

namespace {

double sqrt0(double x) { return std::sqrt(std::max(x, 0.0)); }

struct WitnessTable {
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<char>> covers;  // covers[i][j]: witness i separates dist j
  std::vector<char> coverable;
};

WitnessTable build_witnesses(const std::vector<Distribution>& dists, const Distribution& ref, double tau, Kappa kappa) {
  const std::size_t m = dists.size(), nx = ref.size();
  const double need = tau + kStrictSlack;
  WitnessTable t;
  t.phi.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> phi(nx);
    if (kappa == Kappa::K1) {
      for (std::size_t x = 0; x < nx; ++x) phi[x] = dists[i][x] >= ref[x] ? 1.0 : -1.0;
    } else {
      std::vector<double> up(nx), down(nx);
      for (std::size_t x = 0; x < nx; ++x) {
        up[x] = dists[i][x] > ref[x] ? 1.0 : 0.0;
        down[x] = 1.0 - up[x];
      }
      auto gap = [&](const std::vector<double>& u) {
        return std::fabs(sqrt0(dot(dists[i].span(), u)) - sqrt0(dot(ref.span(), u)));
      };
      phi = gap(up) >= gap(down) ? up : down;
    }
    t.phi[i] = std::move(phi);
  }
  std::vector<double> refv(m);
  t.covers.assign(m, std::vector<char>(m, 0));
  t.coverable.assign(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    double r = dot(ref.span(), t.phi[i]);
    for (std::size_t j = 0; j < m; ++j) {
      double v = dot(dists[j].span(), t.phi[i]);
      double g = kappa == Kappa::K1 ? std::fabs(v - r) : std::fabs(sqrt0(v) - sqrt0(r));
      if (g >= need) t.covers[i][j] = 1, t.coverable[j] = 1;
    }
  }
  return t;
}

// greedy witnesses covering the coverable part of target; uncovered ones get their own witness
std::vector<std::size_t> greedy_indices(const WitnessTable& t, const std::vector<std::size_t>& target,
                                        std::vector<std::size_t>* uncovered) {
  const std::size_t m = t.phi.size();
  std::vector<char> left(m, 0);
  std::size_t remaining = 0;
  for (auto j : target)
    if (t.coverable[j]) left[j] = 1, ++remaining;
    else if (uncovered) uncovered->push_back(j);
  std::vector<std::size_t> out;
  while (remaining) {
    std::size_t best = m, gain = 0;
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t g = 0;
      for (std::size_t j = 0; j < m; ++j) g += (left[j] && t.covers[i][j]) ? 1 : 0;
      if (g > gain) gain = g, best = i;
    }
    out.push_back(best);
    for (std::size_t j = 0; j < m; ++j)
      if (left[j] && t.covers[best][j]) left[j] = 0, --remaining;
  }
  return out;
}

CoverResponse make_response(const WitnessTable& t, std::vector<std::size_t> idx, const std::vector<std::size_t>& uncovered,
                            const DomainPtr& dom, Kappa kappa) {
  for (auto j : uncovered) idx.push_back(j);
  std::vector<std::size_t> seen;
  CoverResponse r;
  for (auto i : idx) {
    if (std::find(seen.begin(), seen.end(), i) != seen.end()) continue;
    seen.push_back(i);
    r.queries.emplace_back(dom, t.phi[i], kappa == Kappa::K1 ? QueryRange::Signed : QueryRange::Unit);
  }
  r.query_weights.assign(r.queries.size(), r.queries.empty() ? 0.0 : 1.0 / static_cast<double>(r.queries.size()));
  r.d = static_cast<double>(r.queries.size());
  r.uncovered = uncovered;
  return r;
}

}  // namespace

CoverResponse greedy_decision_cover(const std::vector<Distribution>& dists, const Distribution& reference, double tau,
                                    Kappa kappa) {
  auto t = build_witnesses(dists, reference, tau, kappa);
  std::vector<std::size_t> all(dists.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> unc;
  auto idx = greedy_indices(t, all, &unc);
  return make_response(t, std::move(idx), unc, reference.domain(), kappa);
}

CoverOracle greedy_cover_oracle(const ProblemSpec& p, double tau, Kappa kappa) {
  auto spec = std::make_shared<const ProblemSpec>(p);
  return [spec, tau, kappa](const Distribution& ref) {
    const auto& pr = *spec;
    const std::size_t m = pr.dists.size(), nf = pr.solutions.size();
    auto t = build_witnesses(pr.dists, ref, tau, kappa);
    std::size_t best_f = nf, best_size = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> best_idx;
    std::vector<std::vector<std::size_t>> rejected(nf);
    for (std::size_t f = 0; f < nf; ++f) {
      for (std::size_t j = 0; j < m; ++j)
        if (!pr.validity[f][j]) rejected[f].push_back(j);
      bool clean = std::all_of(rejected[f].begin(), rejected[f].end(), [&](auto j) { return t.coverable[j] != 0; });
      if (!clean) continue;
      auto idx = greedy_indices(t, rejected[f], nullptr);
      if (idx.size() < best_size) best_size = idx.size(), best_f = f, best_idx = std::move(idx);
    }
    std::vector<std::size_t> unc;
    if (best_f == nf) {
      std::size_t nearest = 0;
      double dist = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j) {
        double d = l1_distance(pr.dists[j].span(), ref.span());
        if (d < dist) dist = d, nearest = j;
      }
      std::size_t fewest = std::numeric_limits<std::size_t>::max();
      for (auto f : pr.valid_solutions(nearest)) {
        std::size_t u = 0;
        for (auto j : rejected[f]) u += t.coverable[j] ? 0 : 1;
        if (u < fewest) fewest = u, best_f = f;
      }
      best_idx = greedy_indices(t, rejected[best_f], &unc);
    }
    auto r = make_response(t, std::move(best_idx), unc, ref.domain(), kappa);
    r.solution = best_f;
    r.solution_measure.assign(nf, 0.0);
    r.solution_measure[best_f] = 1.0;
    return r;
  };
}

// ---------------------------------------------------------------- solvers

namespace {

class ReferenceWalk {
 public:
  ReferenceWalk(const ProblemSpec& p, const SolverOptions& opt, double gamma)
      : p_(p), hull_(opt.project_to_hull), gamma_(gamma) {
    if (hull_) {
      if (opt.start) throw Error(ErrorKind::InvalidArgument, "hull walk always starts at the uniform mixture");
      lambda_.assign(p.dists.size(), 1.0 / static_cast<double>(p.dists.size()));
      kl_ = std::log(static_cast<double>(p.dists.size()));
    } else {
      w_ = opt.start ? opt.start->weights() : uniform_mixture(p.dists).weights();
      Distribution s(p.domain, w_);
      for (const auto& d : p.dists) kl_ = std::max(kl_, kl_divergence(d, s));
    }
    refresh();
  }

  const Distribution& current() const { return cur_; }
  double kl_bound() const { return kl_; }

  void step(const QueryFn& psi) {
    if (hull_) {
      double s = 0;
      for (std::size_t i = 0; i < lambda_.size(); ++i) s += (lambda_[i] *= 1 - gamma_ * expectation(p_.dists[i], psi));
      for (double& l : lambda_) l /= s;
    } else {
      double s = 0;
      for (std::size_t x = 0; x < w_.size(); ++x) s += (w_[x] *= 1 - gamma_ * psi(x));
      for (double& v : w_) v /= s;
    }
    refresh();
  }

 private:
  void refresh() {
    if (hull_) {
      w_.assign(p_.domain->size(), 0.0);
      for (std::size_t i = 0; i < lambda_.size(); ++i)
        for (std::size_t x = 0; x < w_.size(); ++x) w_[x] += lambda_[i] * p_.dists[i][x];
      double s = std::accumulate(w_.begin(), w_.end(), 0.0);
      for (double& v : w_) v /= s;
    }
    cur_ = Distribution(p_.domain, w_);
  }

  const ProblemSpec& p_;
  bool hull_;
  double gamma_;
  double kl_ = 0;
  std::vector<double> w_, lambda_;
  Distribution cur_;
};

void check_session(const OracleSession& s, OracleKind kind, double tol, const char* who) {
  if (s.spec().kind != kind || s.spec().tau > tol * (1 + 1e-12))
    throw Error(ErrorKind::InvalidArgument, std::string(who) + ": oracle must be " + oracle_kind_name(kind) +
                                                " with tolerance <= " + std::to_string(tol));
}

std::optional<std::size_t> input_index(const ProblemSpec& p, const OracleSession& s) {
  for (std::size_t d = 0; d < p.dists.size(); ++d)
    if (p.dists[d].weights() == s.input().weights()) return d;
  return std::nullopt;
}

bool separated(double expect, double answer, double tau, Kappa kappa) {
  double g = kappa == Kappa::K1 ? std::fabs(expect - answer) : std::fabs(sqrt0(expect) - sqrt0(answer));
  return g > 2.0 * tau / 3.0;
}

void finish(RunReport& r, const ProblemSpec& p, const OracleSession& s, std::size_t q0, std::size_t valid0,
            bool deterministic) {
  const auto& e = s.transcript().entries;
  std::size_t n = e.size() - q0, ok = 0;
  for (std::size_t i = q0; i < e.size(); ++i) ok += e[i].valid ? 1 : 0;
  (void)valid0;
  r.queries = n;
  r.valid_answer_fraction = n ? static_cast<double>(ok) / static_cast<double>(n) : 1.0;
  bool all_valid = ok == n;
  auto idx = input_index(p, s);
  bool wrong = false;
  if (r.solution && idx) wrong = !p.valid(*r.solution, *idx);
  if (r.outcome == "no_solution" && idx) wrong = true;
  r.theorem_violation = deterministic && all_valid && (wrong || r.outcome == "budget_exceeded");
}

}  // namespace

std::size_t update_budget(double kl_bound, double tau, Kappa kappa) {
  double b = kappa == Kappa::K1 ? 36.0 * kl_bound / (tau * tau) : 324.0 * kl_bound / (tau * tau * tau * tau);
  return static_cast<std::size_t>(std::ceil(b - 1e-9));
}

RunReport solve_search_universal(const ProblemSpec& p, const CoverOracle& oracle, double tau, OracleSession& session,
                                 const SolverOptions& opt) {
  check_session(session, opt.kappa == Kappa::K1 ? OracleKind::Stat : OracleKind::Vroot, tau / 3.0,
                "universal search solver");
  const double gamma = opt.kappa == Kappa::K1 ? tau / 3.0 : tau * tau / 9.0;
  ReferenceWalk walk(p, opt, gamma);
  RunReport r;
  r.seed = opt.seed;
  r.kl_bound = walk.kl_bound();
  r.update_budget = update_budget(r.kl_bound, tau, opt.kappa);
  const std::size_t q0 = session.queries();
  Rng rng = derived_rng(opt.seed, 1);
  const double delta_step = opt.delta / static_cast<double>(std::max<std::size_t>(r.update_budget, 1));
  for (;;) {
    auto resp = oracle(walk.current());
    std::vector<std::size_t> order;
    if (opt.mode == SolverMode::Deterministic) {
      order.resize(resp.queries.size());
      std::iota(order.begin(), order.end(), 0);
    } else if (!resp.queries.empty()) {
      auto s = static_cast<std::size_t>(std::ceil(resp.d * std::log(1.0 / delta_step)));
      auto cdf = cumulative(resp.query_weights);
      for (std::size_t i = 0; i < s; ++i) order.push_back(sample_index(cdf, rng));
    }
    bool moved = false;
    for (auto i : order) {
      const auto& phi = resp.queries[i];
      double v = session.ask(phi);
      double e = expectation(walk.current(), phi);
      if (separated(e, v, tau, opt.kappa)) {
        int sign = e > v ? 1 : -1;
        walk.step(sign > 0 ? phi : phi.negated());
        r.history.emplace_back(i, sign);
        ++r.updates;
        moved = true;
        break;
      }
    }
    if (!moved) {
      r.outcome = "solution";
      if (opt.mode == SolverMode::Deterministic) {
        r.solution = resp.solution;
      } else {
        auto cdf = cumulative(resp.solution_measure);
        r.solution = sample_index(cdf, rng);
      }
      break;
    }
    if (r.updates > r.update_budget) {
      r.outcome = "budget_exceeded";
      break;
    }
  }
  r.final_reference = walk.current().weights();
  finish(r, p, session, q0, 0, opt.mode == SolverMode::Deterministic);
  return r;
}

namespace {

RunReport verifiable_run(const ProblemSpec& p, double theta, double tau, OracleSession& session,
                         const SolverOptions& opt) {
  if (p.verify.size() != p.solutions.size()) throw Error(ErrorKind::InvalidArgument, "verifiable solver needs queries");
  const double gamma = tau / 3.0;
  ReferenceWalk walk(p, opt, gamma);
  RunReport r;
  r.seed = opt.seed;
  r.kl_bound = walk.kl_bound();
  r.update_budget = update_budget(r.kl_bound, tau, Kappa::K1);
  Rng rng = derived_rng(opt.seed, 2);
  const double delta_step = opt.delta / static_cast<double>(std::max<std::size_t>(r.update_budget, 1));
  for (;;) {
    const auto& cur = walk.current();
    std::size_t fstar = 0;
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < p.verify.size(); ++f) {
      double v = expectation(cur, *p.verify[f]);
      if (v < low) low = v, fstar = f;
    }
    bool moved = false;
    if (low <= theta) {
      double v = session.ask(*p.verify[fstar]);
      if (v <= theta + 2.0 * tau / 3.0) {
        r.outcome = "solution";
        r.solution = fstar;
        break;
      }
      walk.step(p.verify[fstar]->negated());
      r.history.emplace_back(0, -1);
      moved = true;
    } else {
      auto resp = greedy_decision_cover(p.dists, cur, tau, Kappa::K1);
      std::vector<std::size_t> order;
      if (opt.mode == SolverMode::Deterministic) {
        order.resize(resp.queries.size());
        std::iota(order.begin(), order.end(), 0);
      } else if (!resp.queries.empty()) {
        auto s = static_cast<std::size_t>(std::ceil(resp.d * std::log(1.0 / delta_step)));
        auto cdf = cumulative(resp.query_weights);
        for (std::size_t i = 0; i < s; ++i) order.push_back(sample_index(cdf, rng));
      }
      for (auto i : order) {
        const auto& phi = resp.queries[i];
        double v = session.ask(phi);
        double e = expectation(cur, phi);
        if (separated(e, v, tau, Kappa::K1)) {
          int sign = e > v ? 1 : -1;
          walk.step(sign > 0 ? phi : phi.negated());
          r.history.emplace_back(i + 1, sign);
          moved = true;
          break;
        }
      }
      if (!moved) {
        r.outcome = "no_solution";
        break;
      }
    }
    ++r.updates;
    if (r.updates > r.update_budget) {
      r.outcome = "budget_exceeded";
      break;
    }
  }
  r.final_reference = walk.current().weights();
  return r;
}

}  // namespace

RunReport solve_verifiable(const ProblemSpec& p, double theta, double tau, OracleSession& session,
                           const SolverOptions& opt) {
  check_session(session, OracleKind::Stat, tau / 3.0, "verifiable solver");
  const std::size_t q0 = session.queries();
  auto r = verifiable_run(p, theta, tau, session, opt);
  finish(r, p, session, q0, 0, false);
  // validity here is the theta+tau relaxation, judged from the verification query
  r.theorem_violation = false;
  if (opt.mode == SolverMode::Deterministic && session.transcript().all_valid()) {
    if (r.outcome == "budget_exceeded") r.theorem_violation = true;
    if (r.solution && expectation(session.input(), *p.verify[*r.solution]) > theta + tau + 1e-12)
      r.theorem_violation = true;
  }
  return r;
}

RunReport solve_optimizing(const ProblemSpec& p, double tau, OracleSession& session, const SolverOptions& opt) {
  const double inner = 3.0 * tau / 4.0;
  check_session(session, OracleKind::Stat, inner / 3.0, "optimizing solver");
  const std::size_t q0 = session.queries();
  const auto probes = static_cast<std::size_t>(std::ceil(std::log2(4.0 / tau) - 1e-12));
  double lo = 0, hi = 1;
  RunReport best;
  std::size_t updates = 0;
  for (std::size_t i = 0; i < probes; ++i) {
    double mid = (lo + hi) / 2;
    auto r = verifiable_run(p, mid, inner, session, opt);
    updates += r.updates;
    if (r.outcome == "solution") {
      hi = mid;
      best = std::move(r);
    } else {
      lo = mid;
    }
  }
  if (!best.solution) {
    best = verifiable_run(p, 1.0, inner, session, opt);
    updates += best.updates;
  }
  best.updates = updates;
  finish(best, p, session, q0, 0, false);
  best.theorem_violation = false;
  return best;
}

DecisionRun solve_decision_sampled(const std::vector<QueryFn>& witnesses, const std::vector<double>& q, double d,
                                   double tau, double delta, const Distribution& d0, OracleSession& session, Rng& rng) {
  check_session(session, OracleKind::Stat, tau / 2.0, "sampled decision solver");
  if (witnesses.size() != q.size() || witnesses.empty()) throw Error(ErrorKind::InvalidArgument, "witness measure");
  DecisionRun run;
  run.samples = static_cast<std::size_t>(std::ceil(d * std::log(1.0 / delta) - 1e-12));
  auto cdf = cumulative(q);
  for (std::size_t i = 0; i < run.samples; ++i) {
    const auto& phi = witnesses[sample_index(cdf, rng)];
    double v = session.ask(phi);
    ++run.queries;
    if (std::fabs(v - expectation(d0, phi)) > tau / 2.0) {
      run.alternative = true;
      break;
    }
  }
  return run;
}

LearnResult line_p_learn(const LineP& lp, const Distribution& marginal, double eps, OracleSession& session) {
  require_same_domain(marginal.domain(), lp.base(), "line_p_learn marginal");
  LearnResult res;
  const std::size_t np = lp.num_points();
  if (eps >= 1.0) {
    res.hypothesis.assign(np, -1);
    res.error = classification_error(session.input(), res.hypothesis);
    return res;
  }
  check_session(session, OracleKind::Stat, eps * eps / 13.0, "Line_p learner");
  const auto& dom = lp.labeled();
  std::vector<char> heavy(np, 0);
  std::vector<int> h(np, -1);
  for (std::size_t z = 0; z < np; ++z) {
    if (marginal[z] < eps * eps / 12.0) continue;
    heavy[z] = 1;
    std::vector<double> phi(dom->size(), 0.0);
    phi[FiniteDomain::labeled_index(z, 1)] = 1.0;
    phi[FiniteDomain::labeled_index(z, -1)] = -1.0;
    double v = session.ask(QueryFn(dom, std::move(phi)));
    h[z] = v > 0 ? 1 : -1;
    ++res.label_queries;
  }
  double err = session.ask(disagreement_query(dom, h));
  if (err < 5.0 * eps / 6.0) {
    res.hypothesis = h;
  } else {
    // lines whose positive points off the heavy set carry weight >= 2eps/3
    std::vector<std::size_t> cands;
    for (std::size_t a = 0; a < lp.num_lines(); ++a) {
      double w = 0;
      for (std::size_t z = 0; z < np; ++z)
        if (!heavy[z] && lp.on_line(a, z)) w += marginal[z];
      if (w >= 2.0 * eps / 3.0 - 1e-12) cands.push_back(a);
    }
    res.candidates = cands.size();
    double best = std::numeric_limits<double>::infinity();
    res.hypothesis = h;
    for (auto a : cands) {
      std::vector<int> g = h;
      for (std::size_t z = 0; z < np; ++z)
        if (!heavy[z]) g[z] = lp.on_line(a, z) ? 1 : -1;
      double v = session.ask(disagreement_query(dom, g));
      if (v < best) best = v, res.hypothesis = std::move(g);
    }
  }
  res.queries = session.queries();
  res.error = classification_error(session.input(), res.hypothesis);
  return res;
}

}  // namespace sqlab
