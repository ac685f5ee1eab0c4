#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "cranrate/polytope.hpp"

using namespace cranrate;

namespace {

bool same_membership(const ConstraintSystem& a, const ConstraintSystem& b, std::uint64_t seed,
                     std::size_t valuations = 20) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  std::set<std::string> names;
  for (const auto& s : {a.atoms(), b.atoms()}) names.insert(s.begin(), s.end());
  std::vector<AtomValuation> vals;
  for (std::size_t i = 0; i < valuations; ++i) {
    AtomValuation v;
    for (const auto& n : names) v[n] = u(rng);
    vals.push_back(v);
  }
  return regions_equal_sampled(a, b, vals, 400, seed).agree;
}

// Brute-force check of FME soundness for one eliminated variable: the
// projected point is feasible iff the interval for the variable is nonempty.
bool interval_nonempty(const NumericSystem& s, std::size_t var, std::vector<double> x) {
  double lo = -1e300, hi = 1e300;
  for (std::size_t r = 0; r < s.rhs.size(); ++r) {
    double rest = s.rhs[r];
    for (std::size_t i = 0; i < x.size(); ++i)
      if (i != var) rest -= s.lhs[r][i] * x[i];
    double a = s.lhs[r][var];
    if (a > 0)
      hi = std::min(hi, rest / a);
    else if (a < 0)
      lo = std::max(lo, rest / a);
    else if (rest < -1e-9)
      return false;
  }
  return lo <= hi + 1e-9;
}

}  // namespace

TEST_CASE("single pair elimination") {
  auto sys = parse_system("x <= a\n-x <= -b\n");
  auto out = fme_eliminate(sys, "x");
  CHECK(out.variables.empty());
  REQUIRE(out.constraints.size() == 1);
  CHECK(format_constraint(out.constraints[0]) == "0 <= a - b");
}

TEST_CASE("two lower/upper pairings") {
  auto sys = parse_system("vars: x, y\ny <= 5*a\nx - y <= 3\n-y <= 0\n");
  auto out = fme_eliminate(sys, "y");
  CHECK(out.variables == std::vector<std::string>{"x"});
  auto expected = parse_system("vars: x\n0 <= 5*a\nx <= 5*a + 3\n");
  REQUIRE(out.constraints.size() == 2);
  std::set<std::string> got, want;
  for (const auto& c : out.constraints) got.insert(format_constraint(c));
  for (const auto& c : expected.constraints) want.insert(format_constraint(c));
  CHECK(got == want);
}

TEST_CASE("unknown variable") {
  auto sys = parse_system("x <= a\n");
  CHECK_THROWS_AS(fme_eliminate(sys, "z"), std::invalid_argument);
}

TEST_CASE("syntactic_reduce") {
  CHECK(syntactic_reduce(parse_system("x <= a\nx <= a\n")).constraints.size() == 1);
  auto r = syntactic_reduce(parse_system("x <= a\nx <= a + 1\n"));
  REQUIRE(r.constraints.size() == 1);
  CHECK(format_constraint(r.constraints[0]) == "x <= a");
  auto scaled = syntactic_reduce(parse_system("2*x <= 2*a + 1\nx <= a\n"));
  REQUIRE(scaled.constraints.size() == 1);
  CHECK(format_constraint(scaled.constraints[0]) == "x <= a");
  CHECK(syntactic_reduce(parse_system("vars: x\n0 <= 3\nx <= a\n")).constraints.size() == 1);
  // different atoms never merge
  CHECK(syntactic_reduce(parse_system("x <= a\nx <= b\n")).constraints.size() == 2);
}

TEST_CASE("is_member closure and tolerance") {
  auto sys = parse_system("R1 <= C1\n");
  AtomValuation v{{"C1", 1.0}};
  CHECK(is_member(sys, v, {{"R1", 1.0}}, 1e-9));
  CHECK_FALSE(is_member(sys, v, {{"R1", 1.001}}, 1e-9));
  CHECK_THROWS(is_member(sys, {}, {{"R1", 0.0}}, 1e-9));
  CHECK_THROWS(is_member(sys, v, {}, 1e-9));
}

TEST_CASE("regions_equal_sampled") {
  auto a = parse_system("R1 <= C1\n");
  auto b = parse_system("R1 <= 2*C1\n");
  std::vector<AtomValuation> v{{{"C1", 1.0}}};
  CHECK(regions_equal_sampled(a, a, v, 500, 1).agree);
  auto rep = regions_equal_sampled(a, b, v, 500, 1);
  CHECK_FALSE(rep.agree);
  REQUIRE_FALSE(rep.witnesses.empty());
  for (const auto& w : rep.witnesses) {
    CHECK(w.point[0] > 1.0);
    CHECK(w.point[0] <= 2.0 + 1e-9);
    CHECK_FALSE(w.in_a);
    CHECK(w.in_b);
  }
  CHECK_THROWS(regions_equal_sampled(a, b, {}, 10, 1));
  auto c = parse_system("R2 <= C1\n");
  CHECK_THROWS(regions_equal_sampled(a, c, v, 10, 1));
}

TEST_CASE("FME soundness on random systems") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_real_distribution<double> pt(-4.0, 4.0);
  for (int trial = 0; trial < 30; ++trial) {
    ConstraintSystem sys;
    sys.variables = {"x", "y", "z"};
    for (int r = 0; r < 7; ++r) {
      LinearConstraint c;
      for (const auto& v : sys.variables)
        if (int q = coef(rng)) c.lhs[v] = q;
      c.rhs.add("a", coef(rng));
      c.rhs.add("b", coef(rng));
      c.rhs.constant = coef(rng) + 3;
      sys.add(c);
    }
    auto proj = fme_eliminate(sys, "y");
    AtomValuation val{{"a", pt(rng)}, {"b", pt(rng)}};
    auto full = resolve(sys, val);
    auto reduced = resolve(proj, val);
    for (int k = 0; k < 200; ++k) {
      double x = pt(rng), z = pt(rng);
      bool expected = interval_nonempty(full, 1, {x, 0.0, z});
      bool got = reduced.contains({x, z}, 1e-9);
      if (expected != got) {
        // only boundary-tolerance disagreements are acceptable
        CHECK(std::abs(reduced.min_slack({x, z})) < 1e-6);
      }
    }
  }
}

TEST_CASE("multi-variable elimination is order independent and matches sequential") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int trial = 0; trial < 10; ++trial) {
    ConstraintSystem sys;
    sys.variables = {"R1", "R2", "a1", "a2", "a3"};
    for (int r = 0; r < 9; ++r) {
      LinearConstraint c;
      for (const auto& v : sys.variables)
        if (int q = coef(rng)) c.lhs[v] = q;
      c.rhs.add("t" + std::to_string(r % 4), 1);
      c.rhs.constant = 2;
      sys.add(c);
    }
    auto batch = fme_eliminate(sys, std::vector<std::string>{"a1", "a2", "a3"});
    auto reversed = fme_eliminate(sys, std::vector<std::string>{"a3", "a2", "a1"});
    auto seq = fme_eliminate(fme_eliminate(fme_eliminate(sys, "a1"), "a2"), "a3");
    CHECK(same_membership(batch, seq, 100 + trial));
    CHECK(same_membership(reversed, seq, 200 + trial));
  }
}

TEST_CASE("projecting a variable-free system is the identity") {
  auto sys = parse_system("vars: x, y\nx <= a\nx + 2*y <= b\n");
  auto once = fme_eliminate(sys, "y");
  auto again = fme_eliminate(once, std::vector<std::string>{});
  CHECK(again.constraints == once.constraints);
}

TEST_CASE("constraint cap") {
  ConstraintSystem sys;
  sys.variables = {"x", "y"};
  for (int i = 1; i <= 30; ++i) {
    LinearConstraint up, down;
    up.lhs = {{"x", 1}, {"y", i}};
    up.rhs.add("u" + std::to_string(i), 1);
    down.lhs = {{"x", -1}, {"y", i}};
    down.rhs.add("d" + std::to_string(i), 1);
    sys.add(up);
    sys.add(down);
  }
  FmeOptions opts;
  opts.max_constraints = 100;
  CHECK_THROWS_AS(fme_eliminate(sys, "x", opts), FmeLimitError);
  CHECK_NOTHROW(fme_eliminate(sys, "x"));
}

TEST_CASE("text format") {
  const std::string text =
      "vars: R1, R2\n"
      "R1 + R2 <= C1 + C12 - Gamma(U0,V0)\n"
      "2*R1 - 1/2*R2 <= I(U0;Y1) + 3/4\n"
      "0 <= C1\n";
  auto sys = parse_system(text);
  CHECK(format_system(sys) == text);
  CHECK(parse_system(format_system(sys)).constraints == sys.constraints);

  auto moved = parse_system("vars: R1\nR1 + C1 <= 2 + R1 + R1\n");
  CHECK(format_constraint(moved.constraints[0]) == "-R1 <= -C1 + 2");

  auto decimal = parse_system("x <= 0.25*a # comment\n# full comment\n");
  CHECK(format_constraint(decimal.constraints[0]) == "x <= 1/4*a");

  try {
    parse_system("x <= a\nx + 3*  <= b\n");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 9);  // where the name after '*' should start
  }
  CHECK_THROWS_AS(parse_system("x + y\n"), ParseError);
  CHECK_THROWS_AS(parse_system("x <= a b\n"), ParseError);
  CHECK_THROWS_AS(parse_system("x <= 1.2.3\n"), ParseError);
}

TEST_CASE("uniform margin by numeric elimination") {
  NumericSystem s;
  s.variables = {"x", "y"};
  s.lhs = {{1, 0}, {0, 1}};
  s.rhs = {1, 2};
  CHECK(max_uniform_margin(s, {{"x", 0.5}}, {"y"}) == doctest::Approx(0.5));
  // x + y <= 1 carries the margin, y >= 0.8 is exact: y <= 0.5 - t.
  s.lhs = {{1, 1}, {0, -1}};
  s.rhs = {1, -0.8};
  CHECK(max_uniform_margin(s, {{"x", 0.5}}, {"y"}) == doctest::Approx(-0.3));
  // Both rows carry it: y <= 0.5 - t, y >= 0.8 + t.
  s.lhs = {{1, 1}, {0.5, -1}};
  s.rhs = {1, -0.55};
  CHECK(max_uniform_margin(s, {{"x", 0.5}}, {"y"}) == doctest::Approx(-0.15));
  // Only free-variable rows: nothing binds t.
  s.lhs = {{0, 1}, {0, -1}};
  s.rhs = {3, 0.2};
  CHECK(std::isinf(max_uniform_margin(s, {{"x", 0.0}}, {"y"})));
  CHECK(max_uniform_margin(s, {{"x", 0.0}}, {"y"}) > 0);
  // Exact part infeasible: y <= -1 with y >= 0.
  s.lhs = {{1, 0}, {0, 1}};
  s.rhs = {1, -1};
  CHECK(max_uniform_margin(s, {{"x", 0.0}}, {"y"}) == -std::numeric_limits<double>::infinity());
  // Same row without nonnegativity is satisfiable.
  CHECK(max_uniform_margin(s, {{"x", 0.0}}, {}) == doctest::Approx(1.0));
  // A row on fixed variables only caps t at its slack.
  s.lhs = {{1, 0}, {0, 1}};
  s.rhs = {-1, 1};
  CHECK(max_uniform_margin(s, {{"x", 0.0}}, {"y"}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(max_uniform_margin(s, {{"z", 0.0}}, {"y"}), std::invalid_argument);
}

TEST_CASE("uniform margin against a brute-force grid") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0), b(0.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    NumericSystem s;
    s.variables = {"p", "y", "z"};
    for (int r = 0; r < 6; ++r) {
      s.lhs.push_back({u(rng), std::round(2 * u(rng)), std::round(2 * u(rng))});
      s.rhs.push_back(b(rng) - 0.5);
    }
    NumericSystem margin_rows = s;
    s.lhs.push_back({0, 1, 1});  // exact, keeps the free part bounded
    s.rhs.push_back(3);
    double got = max_uniform_margin(s, {{"p", 0.3}}, {"y", "z"});
    // Grid over y, z >= 0, y + z <= 3: best min-slack of the margin rows.
    double best = -1e300;
    for (double y = 0; y <= 3.0001; y += 0.01)
      for (double z = 0; z <= 3.0001 - y; z += 0.01) best = std::max(best, margin_rows.min_slack({0.3, y, z}));
    CHECK(got >= best - 1e-9);
    CHECK(got <= best + 0.05);
  }
}
