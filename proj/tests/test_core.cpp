#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "sqlab/problem_spec.hpp"
#include "sqlab/problems.hpp"

using namespace sqlab;

TEST_CASE("domain ids are unique and nonempty") {
  CHECK_THROWS_AS(FiniteDomain::make({}), Error);
  CHECK_THROWS_AS(FiniteDomain::make({"a", "a"}), Error);
  auto d = FiniteDomain::make({"a", "b", "c"});
  CHECK(d->size() == 3);
  CHECK(d->index_of("b") == 1);
  CHECK(!d->index_of("z"));
  auto l = FiniteDomain::labeled({"u", "v"});
  CHECK(l->is_labeled());
  CHECK(l->size() == 4);
  CHECK(l->id(FiniteDomain::labeled_index(1, 1)) == "v|+1");
}

TEST_CASE("distribution validation") {
  auto d = FiniteDomain::indexed(3);
  CHECK_NOTHROW(Distribution(d, {0.2, 0.3, 0.5}));
  CHECK_THROWS_AS(Distribution(d, {0.2, 0.3, 0.6}), Error);
  CHECK_THROWS_AS(Distribution(d, {-0.1, 0.6, 0.5}), Error);
  CHECK_THROWS_AS(Distribution(d, {0.5, 0.5}), Error);
  CHECK_NOTHROW(Distribution(d, {0.2, 0.3, 0.5 + 5e-13}));
}

TEST_CASE("query range is enforced") {
  auto d = FiniteDomain::indexed(2);
  CHECK_THROWS_AS(QueryFn(d, {1.5, 0}), Error);
  CHECK_THROWS_AS(QueryFn(d, {-0.5, 0}, QueryRange::Unit), Error);
  CHECK(QueryFn(d, {0.5, 0}, QueryRange::Unit).negated().range() == QueryRange::Signed);
}

TEST_CASE("expectation examples") {
  auto dom = FiniteDomain::indexed(2);
  Distribution d(dom, {0.75, 0.25});
  CHECK(expectation(d, QueryFn(dom, {1, -1})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(expectation(d, QueryFn(dom, {1, 1})) == doctest::Approx(1.0).epsilon(1e-15));
  auto other = FiniteDomain::make({"a", "b"});
  CHECK_THROWS_AS(expectation(d, QueryFn(other, {1, 1})), Error);
  CHECK_THROWS_AS(expectation(d, QueryFn(FiniteDomain::indexed(3), {1, 1, 1})), Error);
}

TEST_CASE("line marginal mass on the labeled line") {
  LineP lp(5);
  for (std::size_t a : {0u, 7u, 24u}) {
    auto d = lp.target(Marginal::Skewed, a);
    std::vector<double> phi(lp.labeled()->size(), 0.0);
    for (std::size_t z = 0; z < lp.num_points(); ++z)
      if (lp.on_line(a, z)) phi[FiniteDomain::labeled_index(z, 1)] = 1;
    CHECK(expectation(d, QueryFn(lp.labeled(), phi)) == doctest::Approx(0.6).epsilon(1e-12));
  }
}

TEST_CASE("kl divergence") {
  auto dom = FiniteDomain::indexed(4);
  Rng rng(1);
  auto d = gen::dist(rng, dom);
  CHECK(kl_divergence(d, d) == 0.0);
  CHECK(kl_divergence(Distribution::point(dom, 2), Distribution::uniform(dom)) == doctest::Approx(std::log(4.0)));
  CHECK_THROWS_AS(kl_divergence(Distribution::uniform(dom), Distribution::point(dom, 0)), Error);
}

TEST_CASE("kl radius of a PAC family is at most ln 2") {
  LineP lp(3);
  std::vector<Distribution> ds;
  auto p = lp.marginal(Marginal::Uniform, 0);
  for (std::size_t a = 0; a < lp.num_lines(); ++a) ds.push_back(pac_lift(p, lp.hypothesis(a), lp.labeled()));
  auto r = kl_radius_upper(ds, {uniform_label_center(p, lp.labeled())});
  CHECK(r.value <= std::log(2.0) + 1e-12);
}

TEST_CASE("likelihood hat") {
  auto dom = FiniteDomain::indexed(3);
  Distribution d0(dom, {0.5, 0.25, 0.25});
  for (double v : likelihood_hat(d0, d0)) CHECK(v == 0.0);
  LineP lp(5);
  auto u = Distribution::uniform(lp.labeled());
  auto h = likelihood_hat(lp.target(Marginal::Skewed, 3), u);
  for (std::size_t z = 0; z < lp.num_points(); ++z) {
    int lab = lp.on_line(3, z) ? 1 : -1;
    CHECK(h[FiniteDomain::labeled_index(z, -lab)] == doctest::Approx(-1.0));
    if (lab > 0) CHECK(h[FiniteDomain::labeled_index(z, 1)] == doctest::Approx(5.0));
  }
  CHECK_THROWS_AS(likelihood_hat(Distribution::uniform(dom), Distribution::point(dom, 0)), Error);
}

TEST_CASE("bayes error and pac lift") {
  auto l = FiniteDomain::labeled({"z1", "z2"});
  CHECK(bayes_error(Distribution::uniform(l)) == doctest::Approx(0.5));
  // weights listed per point as (-1, +1)
  CHECK(bayes_error(Distribution(l, {0.4, 0.1, 0.2, 0.3})) == doctest::Approx(0.3));
  auto base = FiniteDomain::make({"z1", "z2"});
  auto lifted = pac_lift(Distribution::uniform(base), {1, 1}, l);
  CHECK(lifted[FiniteDomain::labeled_index(0, 1)] == 0.5);
  CHECK(lifted[FiniteDomain::labeled_index(1, 1)] == 0.5);
  CHECK(bayes_error(lifted) == 0.0);
  CHECK_THROWS_AS(bayes_error(Distribution::uniform(base)), Error);
}

TEST_CASE("line pac lift reproduces the skewed densities") {
  LineP lp(5);
  const double p = 5;
  for (std::size_t a = 0; a < lp.num_lines(); a += 6) {
    auto d = lp.target(Marginal::Skewed, a);
    for (std::size_t z = 0; z < lp.num_points(); ++z) {
      bool on = lp.on_line(a, z);
      double want = on ? 1 / (2 * p) + 1 / (2 * p * p) : 1 / (2 * p * p);
      CHECK(d[FiniteDomain::labeled_index(z, on ? 1 : -1)] == doctest::Approx(want).epsilon(1e-14));
      CHECK(d[FiniteDomain::labeled_index(z, on ? -1 : 1)] == 0.0);
    }
  }
}

TEST_CASE("property: expectation is linear") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    auto dom = FiniteDomain::indexed(gen::between(rng, 1, 12));
    auto d = gen::dist(rng, dom);
    auto f = gen::signed_query(rng, dom->size());
    auto g = gen::signed_query(rng, dom->size());
    double a = uniform01(rng) - 0.5, b = uniform01(rng) - 0.5;
    std::vector<double> h(f.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = a * f[i] + b * g[i];
    CHECK(std::fabs(expectation(d, QueryFn(dom, h)) - a * expectation(d, QueryFn(dom, f)) -
                    b * expectation(d, QueryFn(dom, g))) <= 1e-10);
  }
}

TEST_CASE("property: likelihood hat has zero D0 mean") {
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    auto dom = FiniteDomain::indexed(gen::between(rng, 1, 16));
    auto d0 = gen::dist(rng, dom, 0.05);
    auto d = gen::dist(rng, dom);
    CHECK(std::fabs(dot(d0.weights(), likelihood_hat(d, d0))) <= 1e-9);
  }
}

TEST_CASE("property: mixture radius is at most ln |dists|") {
  Rng rng(13);
  for (int t = 0; t < 200; ++t) {
    auto dom = FiniteDomain::indexed(gen::between(rng, 1, 10));
    auto ds = gen::dists(rng, dom, gen::between(rng, 1, 9));
    auto r = kl_radius_upper(ds);
    CHECK(r.value >= 0);
    CHECK(r.value <= std::log(static_cast<double>(ds.size())) + 1e-9);
  }
}

TEST_CASE("sampling follows the weights") {
  auto dom = FiniteDomain::indexed(3);
  Distribution d(dom, {0.2, 0.5, 0.3});
  auto cdf = cumulative(d.weights());
  Rng rng(5);
  std::vector<int> hits(3, 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++hits[sample_index(cdf, rng)];
  // 6 standard deviations
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(hits[i] / double(n) - d[i]) <= 6 * std::sqrt(0.25 / n));
  CHECK(derived_rng(7, 1)() == derived_rng(7, 1)());
  CHECK(derived_rng(7, 1)() != derived_rng(7, 2)());
}

TEST_CASE("problem spec invariants") {
  auto dom = FiniteDomain::indexed(2);
  ProblemSpec p;
  p.kind = ProblemKind::Decision;
  p.domain = dom;
  p.dists = {Distribution(dom, {0.9, 0.1})};
  p.solutions = {"alternative", "reference"};
  p.validity = {{true}, {false}};
  CHECK_THROWS_AS(p.validate(), Error);  // no reference
  p.reference = Distribution(dom, {0.9, 0.1});
  CHECK_THROWS_AS(p.validate(), Error);  // reference inside the class
  p.reference = Distribution::uniform(dom);
  CHECK_NOTHROW(p.validate());

  ProblemSpec s;
  s.kind = ProblemKind::Search;
  s.domain = dom;
  s.dists = {Distribution::uniform(dom)};
  s.solutions = {"f"};
  s.validity = {{false}};
  CHECK_THROWS_AS(s.validate(), Error);  // distribution without a valid solution
}
