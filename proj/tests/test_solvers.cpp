#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "sqlab/solvers.hpp"

using namespace sqlab;

namespace {

OracleSession exact_stat(double tol, const Distribution& input, std::uint64_t seed = 1) {
  return OracleSession(OracleSpec::stat(tol), AnswerStrategy::exact(), input, seed);
}

// random search problem: every distribution has at least one valid solution
ProblemSpec random_search(Rng& rng, std::size_t nx, std::size_t m, std::size_t nf) {
  ProblemSpec p;
  p.kind = ProblemKind::Search;
  p.domain = FiniteDomain::indexed(nx);
  p.dists = gen::dists(rng, p.domain, m);
  for (std::size_t f = 0; f < nf; ++f) p.solutions.push_back("f" + std::to_string(f));
  p.validity.assign(nf, std::vector<bool>(m, false));
  for (std::size_t d = 0; d < m; ++d) {
    p.validity[gen::between(rng, 0, nf - 1)][d] = true;
    for (std::size_t f = 0; f < nf; ++f)
      if (uniform01(rng) < 0.2) p.validity[f][d] = true;
  }
  p.validate();
  return p;
}

}  // namespace

TEST_CASE("multiplicative weights examples") {
  MultiplicativeWeights mw({0.5, 0.5}, 0.5);
  mw.update({1, -1});
  CHECK(mw.weights()[0] == doctest::Approx(0.25));
  CHECK(mw.weights()[1] == doctest::Approx(0.75));
  CHECK_THROWS_AS(mw.update({1.5, 0}), Error);
  CHECK_THROWS_AS(MultiplicativeWeights({0.5, 0.5}, 1.0), Error);

  auto same = mw_run({0.2, 0.3, 0.5}, 0.2, [](std::size_t t) { return std::vector<double>(3, t % 3 ? 0.7 : -0.4); }, 50);
  CHECK(std::fabs(same.best_expert_regret()) <= 1e-12);

  auto alt = mw_run({0.5, 0.5}, 0.1,
                    [](std::size_t t) { return t % 2 ? std::vector<double>{-1, 1} : std::vector<double>{1, -1}; }, 300);
  CHECK(alt.best_expert_regret() / 300 <= 0.1);
  CHECK(alt.steps() == 300);
}

TEST_CASE("property: average regret is at most gamma") {
  Rng rng(81);
  for (int t = 0; t < 200; ++t) {
    std::size_t m = gen::between(rng, 1, 12);
    double gamma = 0.05 + 0.4 * uniform01(rng);
    auto steps = static_cast<std::size_t>(std::ceil(4 * std::log(static_cast<double>(m)) / (gamma * gamma)));
    steps = std::max<std::size_t>(steps, 1);
    Rng loss_rng = derived_rng(81, static_cast<std::uint64_t>(t));
    auto mw = mw_run(std::vector<double>(m, 1.0 / static_cast<double>(m)), gamma,
                     [&](std::size_t) { return gen::signed_query(loss_rng, m); }, steps);
    CHECK(mw.best_expert_regret() / static_cast<double>(steps) <= gamma);
  }
}

TEST_CASE("property: the reference walk approaches the input") {
  // psi_t = sign(D_t - D) is the largest gap a single query can show; the average still falls under gamma
  Rng rng(82);
  for (int t = 0; t < 100; ++t) {
    auto dom = FiniteDomain::indexed(gen::between(rng, 2, 8));
    auto d = gen::dist(rng, dom);
    std::vector<double> start(dom->size(), 1.0 / static_cast<double>(dom->size()));
    double gamma = 0.05 + 0.2 * uniform01(rng);
    double kl = kl_divergence(d, Distribution(dom, start));
    auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(4 * kl / (gamma * gamma))));
    MultiplicativeWeights mw(start, gamma);
    double gap = 0;
    for (std::size_t s = 0; s < steps; ++s) {
      std::vector<double> psi(dom->size());
      for (std::size_t x = 0; x < psi.size(); ++x) psi[x] = mw.weights()[x] >= d[x] ? 1.0 : -1.0;
      gap += dot(mw.weights(), psi) - dot(d.weights(), psi);
      mw.update(psi);
    }
    CHECK(gap / static_cast<double>(steps) <= gamma + 1e-12);
    CHECK(std::fabs(mw.regret(d.weights()) - gap) <= 1e-9);
  }
}

TEST_CASE("sampled decision solver") {
  auto dom = FiniteDomain::indexed(2);
  auto u = Distribution::uniform(dom);
  Distribution a(dom, {0.75, 0.25});
  std::vector<QueryFn> w = {QueryFn(dom, {1, -1})};
  Rng rng(83);
  auto s0 = exact_stat(0.1, u);
  auto r0 = solve_decision_sampled(w, {1.0}, 1, 0.2, 0.1, u, s0, rng);
  CHECK(!r0.alternative);
  CHECK(r0.samples == 3);  // ceil(ln 10)
  auto s1 = exact_stat(0.1, a);
  auto r1 = solve_decision_sampled(w, {1.0}, 1, 0.2, 0.1, u, s1, rng);
  CHECK(r1.alternative);
  CHECK(r1.queries == 1);
  auto coarse = exact_stat(0.3, a);
  CHECK_THROWS_AS(solve_decision_sampled(w, {1.0}, 1, 0.2, 0.1, u, coarse, rng), Error);
}

TEST_CASE("sampled decision solver succeeds at rate 1 - delta") {
  // four spikes, one witness each: d = 4
  auto dom = FiniteDomain::indexed(4);
  auto u = Distribution::uniform(dom);
  std::vector<Distribution> ds;
  std::vector<QueryFn> w;
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> p(4, 0.125), phi(4, -1.0);
    p[i] += 0.5;
    phi[i] = 1;
    ds.emplace_back(dom, p);
    w.emplace_back(dom, phi);
  }
  const double delta = 0.1, tau = 0.6;
  int ok = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    Rng rng = derived_rng(84, static_cast<std::uint64_t>(t));
    auto s = exact_stat(tau / 2, ds[static_cast<std::size_t>(t) % 4], static_cast<std::uint64_t>(t));
    ok += solve_decision_sampled(w, std::vector<double>(4, 0.25), 4, tau, delta, u, s, rng).alternative;
  }
  CHECK(ok >= (1 - delta) * trials);
}

TEST_CASE("universal solver with a universally valid solution") {
  Rng rng(85);
  auto p = random_search(rng, 4, 5, 3);
  for (std::size_t d = 0; d < p.dists.size(); ++d) p.validity[1][d] = true;
  auto s = exact_stat(0.2 / 3, p.dists[2]);
  auto r = solve_search_universal(p, greedy_cover_oracle(p, 0.2, Kappa::K1), 0.2, s);
  CHECK(r.outcome == "solution");
  CHECK(r.updates == 0);
  REQUIRE(r.solution);
  CHECK(p.valid(*r.solution, 2));
}

TEST_CASE("universal solver recovers the planted bi-clique") {
  auto fam = biclique_family(8, 2);
  const auto& p = fam.search;
  const double tau = 0.2;
  auto oracle = greedy_cover_oracle(p, tau, Kappa::K1);
  const auto stated_budget = static_cast<std::size_t>(std::ceil(36 * std::log(28.0) / (tau * tau)));
  for (std::size_t i = 0; i < p.dists.size(); ++i) {
    auto s = exact_stat(tau / 3, p.dists[i], i);
    auto r = solve_search_universal(p, oracle, tau, s);
    CHECK(r.outcome == "solution");
    REQUIRE(r.solution);
    CHECK(*r.solution == i);
    CHECK(r.updates <= r.update_budget);
    CHECK(r.update_budget <= stated_budget);
    CHECK(!r.theorem_violation);
  }
}

TEST_CASE("universal solver on Line_p with exact answers") {
  auto p = line_family(7, Marginal::Uniform, 0.1);
  const double tau = 0.2;
  auto oracle = greedy_cover_oracle(p, tau, Kappa::K1);
  for (std::size_t i = 0; i < p.dists.size(); i += 6) {
    auto s = exact_stat(tau / 3, p.dists[i], i);
    auto r = solve_search_universal(p, oracle, tau, s);
    REQUIRE(r.solution);
    CHECK(p.valid(*r.solution, i));
    CHECK(r.updates <= r.update_budget);
  }
}

TEST_CASE("universal solver in the square-root mode") {
  auto fam = biclique_family(6, 2);
  const auto& p = fam.search;
  const double tau = 0.2;
  SolverOptions opt;
  opt.kappa = Kappa::KV;
  auto oracle = greedy_cover_oracle(p, tau, Kappa::KV);
  for (std::size_t i = 0; i < p.dists.size(); i += 3) {
    OracleSession s(OracleSpec::vroot(tau / 3), AnswerStrategy::exact(), p.dists[i], i);
    auto r = solve_search_universal(p, oracle, tau, s, opt);
    REQUIRE(r.solution);
    CHECK(p.valid(*r.solution, i));
    CHECK(r.updates <= r.update_budget);
  }
  auto wrong = exact_stat(tau / 3, p.dists[0]);
  CHECK_THROWS_AS(solve_search_universal(p, oracle, tau, wrong, opt), Error);
}

TEST_CASE("randomized universal solver") {
  Rng rng(86);
  auto p = random_search(rng, 5, 6, 4);
  const double tau = 0.15;
  SolverOptions opt;
  opt.mode = SolverMode::Randomized;
  opt.delta = 0.1;
  auto oracle = greedy_cover_oracle(p, tau, Kappa::K1);
  int ok = 0;
  const int trials = 60;
  for (int t = 0; t < trials; ++t) {
    std::size_t d = static_cast<std::size_t>(t) % p.dists.size();
    opt.seed = static_cast<std::uint64_t>(t);
    auto s = exact_stat(tau / 3, p.dists[d], opt.seed);
    auto r = solve_search_universal(p, oracle, tau, s, opt);
    ok += r.solution && p.valid(*r.solution, d);
  }
  CHECK(ok >= (1 - opt.delta) * trials);
}

TEST_CASE("property: reference answers leave a separating query for every rejected distribution") {
  Rng rng(87);
  int solved = 0;
  for (int t = 0; t < 40; ++t) {
    auto p = random_search(rng, gen::between(rng, 2, 5), gen::between(rng, 2, 6), gen::between(rng, 2, 4));
    auto d0 = gen::dist(rng, p.domain, 0.2);
    const double tau = 0.1;
    auto inner = greedy_cover_oracle(p, tau, Kappa::K1);
    CoverResponse last;
    CoverOracle spy = [&](const Distribution& ref) { return last = inner(ref); };
    OracleSession s(OracleSpec::stat(tau / 3), AnswerStrategy::reference_of(d0), p.dists[0], 1);
    auto r = solve_search_universal(p, spy, tau, s);
    if (!r.solution || !last.uncovered.empty()) continue;
    ++solved;
    for (std::size_t d = 0; d < p.dists.size(); ++d) {
      if (p.valid(*r.solution, d)) continue;
      double best = 0;
      for (const auto& phi : last.queries)
        best = std::max(best, std::fabs(expectation(p.dists[d], phi) - expectation(d0, phi)));
      CHECK(best > tau / 3);
    }
  }
  CHECK(solved > 10);
}

TEST_CASE("verifiable solver") {
  auto fam = biclique_family(8, 2);
  const auto& p = fam.verifiable;
  const double theta = 0.25, tau = 0.2;
  // the uniform mixture is within tau of every D_S and above theta on every phi_S, so no query
  // can move it; the uniform cube sits on the threshold instead
  auto stuck = exact_stat(tau / 3, p.dists[0]);
  CHECK(solve_verifiable(p, theta, tau, stuck).outcome == "no_solution");
  SolverOptions opt;
  opt.start = Distribution::uniform(p.domain);
  for (std::size_t i = 0; i < p.dists.size(); i += 5) {
    auto s = exact_stat(tau / 3, p.dists[i], i);
    auto r = solve_verifiable(p, theta, tau, s, opt);
    REQUIRE(r.solution);
    CHECK(expectation(p.dists[i], *p.verify[*r.solution]) <= theta + tau);
    CHECK(!r.theorem_violation);
  }
  auto s = exact_stat(tau / 3, p.dists[3]);
  auto r = solve_verifiable(p, 1.0, tau, s);
  REQUIRE(r.solution);
  CHECK(r.updates == 0);
  CHECK(r.queries == 1);
}

TEST_CASE("optimizing solver") {
  auto dom = FiniteDomain::indexed(3);
  ProblemSpec flat;
  flat.kind = ProblemKind::Optimizing;
  flat.domain = dom;
  flat.dists = {Distribution(dom, {0.2, 0.3, 0.5}), Distribution(dom, {0.6, 0.3, 0.1})};
  flat.solutions = {"a", "b"};
  flat.verify = {QueryFn(dom, {0.5, 0.5, 0.5}, QueryRange::Unit), QueryFn(dom, {0.5, 0.5, 0.5}, QueryRange::Unit)};
  flat.eps = 0.1;
  flat.derive_validity();
  flat.validate();
  auto s = exact_stat(0.2 / 4, flat.dists[0]);
  auto r = solve_optimizing(flat, 0.2, s);
  REQUIRE(r.solution);
  CHECK(flat.valid(*r.solution, 0));

  Rng rng(88);
  for (int t = 0; t < 30; ++t) {
    ProblemSpec p;
    p.kind = ProblemKind::Optimizing;
    p.domain = FiniteDomain::indexed(gen::between(rng, 2, 5));
    p.dists = gen::dists(rng, p.domain, gen::between(rng, 1, 4));
    std::size_t nf = gen::between(rng, 1, 4);
    for (std::size_t f = 0; f < nf; ++f) {
      std::vector<double> phi(p.domain->size());
      for (auto& x : phi) x = uniform01(rng);
      p.solutions.push_back("f" + std::to_string(f));
      p.verify.emplace_back(QueryFn(p.domain, phi, QueryRange::Unit));
    }
    p.eps = 0.05;
    p.derive_validity();
    const double tau = 0.2;
    std::size_t d = gen::between(rng, 0, p.dists.size() - 1);
    auto sess = exact_stat(tau / 4, p.dists[d], static_cast<std::uint64_t>(t));
    auto out = solve_optimizing(p, tau, sess);
    REQUIRE(out.solution);
    double best = INFINITY;
    for (std::size_t f = 0; f < nf; ++f) best = std::min(best, expectation(p.dists[d], *p.verify[f]));
    CHECK(expectation(p.dists[d], *p.verify[*out.solution]) <= best + tau + 1e-12);
  }
}

TEST_CASE("line learner") {
  LineP lp(5);
  auto point = Distribution::point(lp.base(), 7);
  for (std::size_t a : {0u, 13u}) {
    auto target = pac_lift(point, lp.hypothesis(a), lp.labeled());
    auto s = exact_stat(0.3 * 0.3 / 13, target);
    auto r = line_p_learn(lp, point, 0.3, s);
    CHECK(r.label_queries == 1);
    CHECK(r.error == 0.0);
  }

  LineP big(11);
  auto uni = Distribution::uniform(big.base());
  const double eps = 0.3;
  for (std::size_t a = 0; a < big.num_lines(); a += 17) {
    auto target = pac_lift(uni, big.hypothesis(a), big.labeled());
    auto s = exact_stat(eps * eps / 13, target, a);
    auto r = line_p_learn(big, uni, eps, s);
    CHECK(r.error <= eps);
    CHECK(r.queries <= 12 / (eps * eps) + 1 + 2 / eps + 1);
  }

  auto target = pac_lift(uni, big.hypothesis(3), big.labeled());
  auto s = exact_stat(0.5, target);
  auto flat = line_p_learn(big, uni, 2.0, s);
  CHECK(flat.hypothesis == std::vector<int>(big.num_points(), -1));
  CHECK(flat.queries == 0);
  auto loose = exact_stat(0.1, target);
  CHECK_THROWS_AS(line_p_learn(big, uni, 0.3, loose), Error);
}
