#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "sqlab/io.hpp"

using namespace sqlab;

TEST_CASE("non-finite numbers serialize as strings") {
  CHECK(num(INFINITY) == "inf");
  CHECK(num(-INFINITY) == "-inf");
  CHECK(num(NAN) == "nan");
  CHECK(num(0.25) == 0.25);
  CHECK(std::isinf(num_from(json("inf"))));
  CHECK(num_from(json(1.5)) == 1.5);
  CHECK_THROWS_AS(num_from(json("one")), Error);
  DimensionReport r;
  r.quantity = "rsd";
  r.value = INFINITY;
  r.uncoverable = 3;
  auto j = to_json(r);
  CHECK(j["value"] == "inf");
  CHECK(j.dump().find("Infinity") == std::string::npos);
}

TEST_CASE("csv formatting") {
  CHECK(csv_double(0.1) == "0.10000000000000001");
  CHECK(csv_double(INFINITY) == "inf");
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_scalar(json(true)) == "true");
  CHECK(csv_scalar(json(3)) == "3");
}

TEST_CASE("problem round trip is bit stable") {
  Rng rng(101);
  for (int t = 0; t < 30; ++t) {
    ProblemSpec p;
    p.kind = ProblemKind::Search;
    p.name = "random" + std::to_string(t);
    p.domain = FiniteDomain::indexed(gen::between(rng, 1, 6));
    p.dists = gen::dists(rng, p.domain, gen::between(rng, 1, 4));
    p.reference = gen::dist(rng, p.domain, 0.1);
    p.solutions = {"a", "b"};
    p.validity.assign(2, std::vector<bool>(p.dists.size(), true));
    p.validate();
    auto back = problem_from_json(json::parse(problem_to_json(p).dump()));
    REQUIRE(back.dists.size() == p.dists.size());
    for (std::size_t i = 0; i < p.dists.size(); ++i) CHECK(back.dists[i].weights() == p.dists[i].weights());
    CHECK(back.reference->weights() == p.reference->weights());
    CHECK(back.validity == p.validity);
    CHECK(back.name == p.name);
    CHECK(problem_to_json(back).dump() == problem_to_json(p).dump());
  }
  auto fam = biclique_family(4, 2);
  auto v = problem_from_json(problem_to_json(fam.verifiable));
  CHECK(*v.threshold == 0.5);
  CHECK(v.verify.size() == fam.verifiable.verify.size());
  auto line = line_family(3, Marginal::Skewed, 0.1);
  auto l = problem_from_json(problem_to_json(line));
  CHECK(l.domain->is_labeled());
  CHECK(l.validity == line.validity);
}

TEST_CASE("malformed problems are rejected") {
  auto fam = biclique_family(4, 2);
  auto j = problem_to_json(fam.search);
  j["dists"][0][0] = 0.9;
  CHECK_THROWS_AS(problem_from_json(j), Error);
  auto k = problem_to_json(fam.search);
  k["kind"] = "nonsense";
  CHECK_THROWS_AS(problem_from_json(k), Error);
}

TEST_CASE("report merge") {
  auto a = tag_report({{"value", 2.0}, {"exactness", "exact"}}, "dims", "zeta");
  auto b = tag_report({{"value", 0.1}, {"exactness", "exact"}}, "dims", "alpha");
  CHECK(report_merge({a}) == "report,instance,exactness,value\r\ndims,zeta,exact,2\r\n");
  CHECK(report_merge({a, b}) ==
        "report,instance,exactness,value\r\ndims,alpha,exact,0.10000000000000001\r\ndims,zeta,exact,2\r\n");
  CHECK(report_merge({}) == "report,instance\r\n");
  auto c = tag_report({{"value", 1.0}}, "audit", "x");
  CHECK_THROWS_AS(report_merge({a, c}), Error);
}
