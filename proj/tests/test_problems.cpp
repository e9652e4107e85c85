#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "sqlab/norms.hpp"
#include "sqlab/problems.hpp"

using namespace sqlab;

namespace {

// D_S by the sampling process: each x has weight (1-q) 2^-n, plus q 2^-(n-k) when x covers S
double process_weight(std::size_t n, std::size_t k, Subset s, std::size_t x) {
  const double q = static_cast<double>(k) / static_cast<double>(n);
  double w = (1 - q) / std::ldexp(1.0, static_cast<int>(n));
  if ((x & s) == s) w += q / std::ldexp(1.0, static_cast<int>(n - k));
  return w;
}

}  // namespace

TEST_CASE("bi-clique conjunction values") {
  auto fam = biclique_family(8, 2);
  CHECK(fam.planted.size() == 28);
  const auto& ve = fam.verifiable;
  CHECK(*ve.threshold == doctest::Approx(0.25));
  auto u = Distribution::uniform(ve.domain);
  for (std::size_t i = 0; i < fam.planted.size(); ++i) {
    CHECK(expectation(ve.dists[i], *ve.verify[i]) == doctest::Approx(0.4375).epsilon(1e-12));
    CHECK(expectation(u, *ve.verify[i]) == doctest::Approx(0.25).epsilon(1e-12));
  }
  CHECK(ve.in_unsolved_region(u, 0.2));
  CHECK(!ve.in_unsolved_region(u, 0.25));

  auto full = biclique_family(4, 4);
  const double q = 4.0 / 4.0;
  double want = q + (1 - q) * std::ldexp(1.0, -4);  // k/n + (1 - k/n) 2^-n with k = n
  CHECK(expectation(full.verifiable.dists[0], *full.verifiable.verify[0]) == doctest::Approx(want));
  CHECK(biclique_conjunction(6, 6, 63, 63) == doctest::Approx(1.0));
  CHECK(biclique_conjunction(6, 3, 7, 7) == doctest::Approx(0.5 + 0.5 / 8));

  CHECK_THROWS_AS(biclique_family(8, 0), Error);
  CHECK_THROWS_AS(biclique_family(4, 5), Error);
  CHECK_THROWS_AS(biclique_distribution(cube_domain(4), 4, 2, 0), Error);
}

TEST_CASE("bi-clique table matches the sampling process") {
  for (std::size_t n : {3u, 6u, 8u})
    for (std::size_t k = 1; k <= n; k += 2)
      for (auto s : k_subsets(n, k)) {
        auto d = biclique_distribution(cube_domain(n), n, k, s);
        for (std::size_t x = 0; x < d.size(); ++x) CHECK(std::fabs(d[x] - process_weight(n, k, s, x)) <= 1e-15);
        if (n == 8) break;
      }
}

TEST_CASE("property: closed forms agree with enumeration") {
  Rng rng(71);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = gen::between(rng, 1, 12), k = gen::between(rng, 1, n);
    auto cube = cube_domain(n);
    auto all = k_subsets(n, k);
    Subset s = all[gen::between(rng, 0, all.size() - 1)];
    Subset q = gen::between(rng, 0, full_set(n));
    auto d = biclique_distribution(cube, n, k, s);
    CHECK(std::fabs(expectation(d, conjunction_query(cube, q)) - biclique_conjunction(n, k, s, q)) <= 1e-12);
    std::vector<double> par(cube->size());
    for (std::size_t x = 0; x < par.size(); ++x) par[x] = (popcount(x & q) & 1) ? -1.0 : 1.0;
    CHECK(std::fabs(expectation(d, QueryFn(cube, par)) - biclique_parity(n, k, s, q)) <= 1e-12);
  }
  for (int t = 0; t < 100; ++t) {
    const std::size_t ps[] = {2, 3, 5, 7, 11, 13};
    LineP lp(ps[gen::between(rng, 0, 5)]);
    std::size_t a = gen::between(rng, 0, lp.num_lines() - 1);
    auto d = lp.target(Marginal::Skewed, a);
    auto phi = gen::signed_query(rng, lp.labeled()->size());
    // density form of the skewed target
    const double p = static_cast<double>(lp.p());
    double want = 0;
    for (std::size_t z = 0; z < lp.num_points(); ++z) {
      bool on = lp.on_line(a, z);
      want += (on ? 1 / (2 * p) + 1 / (2 * p * p) : 1 / (2 * p * p)) * phi[FiniteDomain::labeled_index(z, on ? 1 : -1)];
    }
    CHECK(std::fabs(expectation(d, QueryFn(lp.labeled(), phi)) - want) <= 1e-12);
  }
}

TEST_CASE("line geometry") {
  LineP lp(5);
  CHECK(lp.labeled()->size() == 50);
  for (std::size_t a = 0; a < lp.num_lines(); ++a) {
    std::size_t on = 0;
    for (std::size_t z = 0; z < lp.num_points(); ++z) on += lp.on_line(a, z);
    CHECK(on == 5);
  }
  // two non-parallel lines meet once, parallel ones never
  std::size_t meet = 0, par = 0;
  for (std::size_t z = 0; z < lp.num_points(); ++z) {
    meet += lp.on_line(0, z) && lp.on_line(5, z);
    par += lp.on_line(0, z) && lp.on_line(1, z);
  }
  CHECK(meet == 1);
  CHECK(par == 0);
  CHECK(lp.labeled()->id(0) == "0,0|-1");
  CHECK(lp.labeled()->id(1) == "0,0|+1");
  CHECK(lp.labeled()->id(2) == "0,1|-1");
  CHECK_THROWS_AS(LineP(4), Error);
  CHECK_THROWS_AS(LineP(1), Error);
}

TEST_CASE("line audit at p = 5") {
  auto r = line_audit(5);
  CHECK(r.same == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.same_bound == doctest::Approx(3.5));
  CHECK(r.parallel == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(r.other == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(r.same_err <= 1e-12);
  CHECK(r.parallel_err <= 1e-12);
  CHECK(r.other_err <= 1e-12);
  CHECK(r.rho <= 2.0 / 5);
  CHECK(r.rho == doctest::Approx(r.rho_closed).epsilon(1e-12));
  CHECK(r.kbar1 <= 4 * std::sqrt(2.0 / 5));
  CHECK(r.passes());
}

TEST_CASE("line audit chain holds for small primes") {
  double prev = 0;
  for (std::size_t p : {2u, 3u, 5u, 7u}) {
    auto r = line_audit(p);
    CHECK(r.passes());
    CHECK(r.kbar1 <= 4 * std::sqrt(r.rho) + 1e-12);
    double lower = 0.25 * std::sqrt(p / 2.0);
    CHECK(lower > prev);
    prev = lower;
  }
}

TEST_CASE("pac wrappers") {
  auto l = FiniteDomain::labeled({"z1", "z2"});
  auto base = FiniteDomain::make({"z1", "z2"});
  auto p = Distribution::uniform(base);
  // concepts: all four labelings; hypothesis: constant +1 only
  std::vector<std::vector<int>> concepts = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  auto spec = pac_problem(l, {p}, concepts, 0.0, {{1, 1}});
  REQUIRE(spec.dists.size() == 4);
  REQUIRE(spec.solutions.size() == 1);
  CHECK(spec.valid(0, 0));
  for (std::size_t d = 1; d < 4; ++d) CHECK(!spec.valid(0, d));
  CHECK_THROWS_AS(pac_problem(l, {p}, {}, 0.1), Error);

  auto center = uniform_label_center(p, l);
  for (const auto& d : spec.dists) CHECK(kl_divergence(d, center) == doctest::Approx(std::log(2.0)));
  CHECK(bayes_error(center) == doctest::Approx(0.5));

  auto line = line_family(5, Marginal::Uniform, 0.1);
  auto d0 = Distribution::uniform(line.domain);
  CHECK(bayes_error(d0) == doctest::Approx(0.5));
  CHECK(line.in_unsolved_region(d0, 0.1));
  for (std::size_t a = 0; a < line.dists.size(); a += 4) CHECK(line.valid(a, a));
}
