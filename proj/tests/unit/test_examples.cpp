#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>

#include "cranrate/examples.hpp"
#include "cranrate/scheme_regions.hpp"
#include "doctest.h"

using namespace cranrate;

namespace {

double h2(double p) { return (p <= 0 || p >= 1) ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

// Binary U, X through a BSC(e): both terms written out by hand.
double bsc_gcomp_rate(double e, double c1, const double p[4]) {
  // p[u*2 + x]; y flips x with probability e.
  double pux[2][2] = {{p[0], p[1]}, {p[2], p[3]}};
  double puy[2][2] = {}, pxy[2][2] = {}, puxy[2][2][2] = {};
  for (int u = 0; u < 2; ++u)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        double w = pux[u][x] * (x == y ? 1 - e : e);
        puy[u][y] += w;
        pxy[x][y] += w;
        puxy[u][x][y] = w;
      }
  auto H = [](std::initializer_list<double> v) {
    double s = 0.0;
    for (double q : v)
      if (q > 0) s -= q * std::log2(q);
    return s;
  };
  double pu0 = p[0] + p[1], py0 = puy[0][0] + puy[1][0];
  double hu = H({pu0, 1 - pu0}), hy = H({py0, 1 - py0});
  double huy = H({puy[0][0], puy[0][1], puy[1][0], puy[1][1]});
  double hxy = H({pxy[0][0], pxy[0][1], pxy[1][0], pxy[1][1]});
  double huxy = 0.0;
  for (auto& a : puxy)
    for (auto& b : a) huxy += H({b[0], b[1]});
  double i_uy = hu + hy - huy;
  double i_ux_given_y = huy + hxy - huxy - hy;
  return std::min(i_uy, c1 - i_ux_given_y);
}

Channel identity_channel() { return bsc(0.0); }

}  // namespace

TEST_CASE("single-user compression rate by hand") {
  const double p[4] = {0.5, 0.0, 0.0, 0.5};  // U = X uniform
  CHECK(gcomp_single_user_rate(bsc(0.1), {0.5, 0.0, 0.0, 0.5}, 2, 0.8) ==
        doctest::Approx(std::min(1 - h2(0.1), 0.8 - h2(0.1))));
  CHECK(gcomp_single_user_rate(bsc(0.1), {0.5, 0.0, 0.0, 0.5}, 2, 0.8) == doctest::Approx(bsc_gcomp_rate(0.1, 0.8, p)));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    double q[4], s = 0;
    for (double& x : q) s += x = u(rng);
    for (double& x : q) x /= s;
    CHECK(gcomp_single_user_rate(bsc(0.2), {q[0], q[1], q[2], q[3]}, 2, 0.4) ==
          doctest::Approx(bsc_gcomp_rate(0.2, 0.4, q)).epsilon(1e-12));
  }
}

TEST_CASE("noisy hop: compression falls strictly short of capacity") {
  ExampleReport r = example1_run(bsc(0.1), 0.3);
  CHECK(r.values["capacity"] == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(r.values["max_input_mi"] == doctest::Approx(1 - h2(0.1)).epsilon(1e-7));
  CHECK(r.values["gcomp_best"] < 0.3);
  CHECK(r.values["margin"] > 0.0);
  CHECK(r.verdict == "sampled-consistent");
  // Grid oracle over binary U: the search must do at least as well.
  double grid = -1.0;
  const int n = 60;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; a + b <= n; ++b)
      for (int c = 0; a + b + c <= n; ++c) {
        double p[4] = {a / double(n), b / double(n), c / double(n), (n - a - b - c) / double(n)};
        grid = std::max(grid, bsc_gcomp_rate(0.1, 0.3, p));
      }
  CHECK(r.values["gcomp_best"] >= grid - 1e-9);
  CHECK(grid < 0.3);
}

TEST_CASE("deterministic hop: compression reaches capacity") {
  ExampleReport r = example1_run(identity_channel(), 0.5);
  CHECK(r.values["capacity"] == doctest::Approx(0.5));
  CHECK(r.values["margin"] <= 1e-6);
  CHECK(r.values["margin"] >= -1e-12);
  CHECK(r.verdict == "confirmed");
  CHECK(r.notes["channel"] == "deterministic");
  // A 3-ary deterministic map as well.
  Channel f = deterministic_channel({{"X", 3}}, {"Y", 2}, [](const auto& d) { return d[0] == 2 ? 1u : 0u; });
  ExampleReport r2 = example1_run(f, 0.7);
  CHECK(r2.values["capacity"] == doctest::Approx(0.7));
  CHECK(r2.verdict == "confirmed");
}

TEST_CASE("useless hop has zero capacity") {
  ExampleReport r = example1_run(bsc(0.5), 1.0);
  CHECK(r.values["capacity"] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.values["gcomp_best"] <= 1e-9);
  CHECK(r.verdict != "failed");
}

TEST_CASE("example 1 rejects bad inputs") {
  Channel two_in({{"A", 2}, {"B", 2}}, {{"Y", 2}}, {1, 0, 0, 1, 0, 1, 1, 0});
  CHECK_THROWS_AS(example1_run(two_in, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(example1_run(bsc(0.1), -1.0), std::invalid_argument);
}

TEST_CASE("z-channel compression pmf is exact") {
  JointPmf pmf = example2_compression_pmf();
  CHECK(mutual_info(pmf, {"U1"}, {"Y1"}) == 1.0);
  CHECK(mutual_info(pmf, {"U2"}, {"Y2"}) == 1.0);
  CHECK(mutual_info(pmf, {"U1"}, {"U2"}) == 0.0);
  CHECK(mutual_info(pmf, {"U1", "U2"}, {"X1"}) == 1.0);
  CHECK(mutual_info(pmf, {"U1", "U2"}, {"X1", "X2"}) == 2.0);
  ExampleReport r = example2_part_a();
  CHECK(r.verdict == "confirmed");
  CHECK(r.values["min_slack_at_1_1"] >= 0.0);
  CHECK(r.values["max_sum_rate"] == 2.0);
  CHECK(r.notes["integral_atoms"] == "true");
  // (1, 1 + 1e-9) is outside.
  const ConstraintSystem t2 = gcomp_theorem2_region();
  AtomValuation v = atom_valuation(pmf, information_atoms(t2));
  for (const auto& [k, c] : example2_capacities()) v[k] = c;
  CHECK_FALSE(resolve(t2, v).contains({1.0, 1.0 + 1e-9}, 0.0));
}

TEST_CASE("constant auxiliaries give the origin only") {
  JointPmf pmf({{"U0", 1}, {"V0", 1}, {"U1", 1}, {"V1", 1}, {"U2", 1}, {"V2", 1}, {"X1", 2}, {"X2", 2}},
               {1.0, 0.0, 0.0, 0.0});
  pmf = compose(pmf, deterministic_channel({{"X1", 2}}, {"Y1", 2}, [](const auto& d) { return d[0]; }));
  pmf = compose(pmf, deterministic_channel({{"X1", 2}, {"X2", 2}}, {"Y2", 2}, [](const auto& d) { return d[0] ^ d[1]; }));
  const ConstraintSystem s = gds_theorem1_system();
  AtomValuation v = atom_valuation(pmf, information_atoms(s));
  for (const auto& [k, c] : example2_capacities()) v[k] = c;
  CHECK(theorem1_margin(v, 0.0, 0.0) == doctest::Approx(0.0));
  CHECK(theorem1_margin(v, 0.01, 0.0) < 0.0);
  CHECK(theorem1_margin(v, 0.0, 0.01) < 0.0);
}

TEST_CASE("sampled multicoding margins respect the relaxed necessary conditions") {
  // Two nonnegative combinations of the multicoding rows: if (1, 1) meets the
  // system then both sums below are >= 0.
  std::mt19937_64 rng(8);
  const ConstraintSystem s = gds_theorem1_system();
  std::size_t positive = 0;
  for (int i = 0; i < 600; ++i) {
    JointPmf pmf = example2_gds_pmf(rng, i % 3);
    AtomValuation v = atom_valuation(pmf, information_atoms(s));
    for (const auto& [k, c] : example2_capacities()) v[k] = c;
    const VarList u{"U0", "U1", "U2"}, w{"V0", "V1", "V2"};
    double a = mutual_info(pmf, u, {"Y1"}) + mutual_info(pmf, w, {"Y2"}) - mutual_info(pmf, u, w) - 2.0;
    double b = 2.0 + mutual_info(pmf, {"U1", "U2"}, {"Y1"}, {"U0"}) -
               mutual_info(pmf, {"U1", "V1"}, {"U2", "V2"}, {"U0", "V0"}) - 3.0;
    double m = theorem1_margin(v, 1.0, 1.0);
    if (m >= 0) {
      CHECK(a >= -1e-9);
      CHECK(b >= -1e-9);
    }
    positive += m > 0;
    // Moving the point toward the origin never lowers the margin.
    CHECK(theorem1_margin(v, 0.5, 0.5) >= m - 1e-9);
  }
  CHECK(positive == 0);
}

TEST_CASE("z-channel multicoding sweep") {
  auto t0 = std::chrono::steady_clock::now();
  ExampleReport r = example2_part_b({10000, 1});
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("10^4 samples in " << secs << " s, max margin " << r.values["max_margin_at_1_1"]);
  CHECK(r.verdict == "sampled-consistent");
  CHECK(r.values["max_margin_at_1_1"] <= 1e-6);
  CHECK(r.values["samples"] == 10000);
}

TEST_CASE("sweep does not depend on the thread count") {
  setenv("CRANRATE_THREADS", "1", 1);
  std::string one = reports_to_json({example2_part_b({300, 5})});
  setenv("CRANRATE_THREADS", "3", 1);
  std::string three = reports_to_json({example2_part_b({300, 5})});
  unsetenv("CRANRATE_THREADS");
  CHECK(one == three);
}
