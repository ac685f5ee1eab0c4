#include <cmath>
#include <cstdlib>
#include <random>

#include "cranrate/gaussian_schemes.hpp"
#include "cranrate/scheme_regions.hpp"
#include "doctest.h"

using namespace cranrate;

namespace {

double half_log(double x) { return 0.5 * std::log2(x); }

// Best rank-one full-power dirty-paper sum rate: antenna i splits its power
// as (cos phi_i, sin phi_i) between the two users' beams.
double rank_one_grid(const Eigen::MatrixXd& g, double p, double step) {
  double best = 0.0;
  for (double a = 0.0; a < 2 * M_PI; a += step)
    for (double b = 0.0; b < 2 * M_PI; b += step) {
      Eigen::Vector2d v1(std::sqrt(p) * std::cos(a), std::sqrt(p) * std::cos(b));
      Eigen::Vector2d v2(std::sqrt(p) * std::sin(a), std::sqrt(p) * std::sin(b));
      Eigen::Matrix2d k1 = v1 * v1.transpose(), k2 = v2 * v2.transpose();
      best = std::max({best, dpc_sumrate(g, k1, k2, false), dpc_sumrate(g, k1, k2, true)});
    }
  return best;
}

Eigen::Matrix2d random_psd(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix2d l;
  l << n(rng), 0.0, n(rng), n(rng);
  return scale * l * l.transpose();
}

// Scales both covariances so diag(K1 + K2) <= p.
void fit_power(Eigen::Matrix2d& k1, Eigen::Matrix2d& k2, double p) {
  Eigen::Matrix2d s = k1 + k2;
  Eigen::Vector2d d;
  for (int i = 0; i < 2; ++i) d(i) = s(i, i) > p ? std::sqrt(p / s(i, i)) : 1.0;
  k1 = d.asDiagonal() * k1 * d.asDiagonal();
  k2 = d.asDiagonal() * k2 * d.asDiagonal();
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (auto s : {GaussianScheme::GdsI, GaussianScheme::GdsII, GaussianScheme::GdsIII, GaussianScheme::GComp,
                 GaussianScheme::GdsTimeShare})
    CHECK(scheme_from_name(scheme_name(s)) == s);
  CHECK_THROWS_AS(scheme_from_name("GDS-IV"), std::invalid_argument);
}

TEST_CASE("common-message covariance against closed-form information terms") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_real_distribution<double> u(-1.5, 1.5), pw(0.5, 50.0);
    CranNetwork net = CranNetwork::symmetric(pw(rng), u(rng), u(rng), 1.0, 0.0);
    Eigen::Matrix2d k1 = random_psd(rng, net.P), k2 = random_psd(rng, net.P);
    fit_power(k1, k2, net.P);
    JointCovariance cov = build_joint_cov(DescriptionIParams{k1, k2, false}, net);
    const Eigen::RowVector2d g1 = net.G.row(0), g2 = net.G.row(1);
    double iu = half_log((1 + g1 * (k1 + k2) * g1.transpose()) / (1 + g1 * k2 * g1.transpose()));
    double dpc = half_log(1 + g2 * k2 * g2.transpose());
    CHECK(gauss_mi(cov, {"U0"}, {"Y1"}) == doctest::Approx(iu).epsilon(1e-8));
    CHECK(gauss_mi(cov, {"V0"}, {"Y2"}) - gauss_mi(cov, {"U0"}, {"V0"}) == doctest::Approx(dpc).epsilon(1e-8));
    // Precoding against the known interference never hurts user 2.
    double no_precoder = half_log((1 + g2 * (k1 + k2) * g2.transpose()) / (1 + g2 * k1 * g2.transpose()));
    CHECK(dpc >= no_precoder - 1e-12);

    double c = 0.3 + trial * 0.2, t = 0.1 * trial;
    CranNetwork capped = CranNetwork::symmetric(net.P, net.G(0, 1), net.G(1, 0), c, t);
    double expected = std::max(0.0, std::min({c + t, 2 * c, iu + dpc}));
    CHECK(scheme_sumrate(DescriptionIParams{k1, k2, false}, capped) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("degenerate common-message parameters") {
  CranNetwork net = CranNetwork::symmetric(4.0, 0.5, 0.5, 1.0, 0.0);
  Eigen::Matrix2d k1 = 2.0 * Eigen::Matrix2d::Identity();
  JointCovariance cov = build_joint_cov(DescriptionIParams{k1, Eigen::Matrix2d::Zero(), false}, net);
  CHECK(gauss_mi(cov, {"V0"}, {"Y2"}) == 0.0);
  CHECK(dirty_paper_precoder(Eigen::Matrix2d::Zero(), net.G.row(1)).isZero());

  CranNetwork off = CranNetwork::symmetric(0.0, 0.5, 0.5, 1.0, 0.0);
  JointCovariance zero = build_joint_cov(DescriptionIParams{}, off);
  CHECK(zero.matrix().topLeftCorner(6, 6).isZero());
  CHECK(gauss_mi(zero, {"U0"}, {"Y1"}) == 0.0);
  CHECK(scheme_sumrate(DescriptionIParams{}, off) == 0.0);
  CHECK(scheme_sumrate(DescriptionIIParams{}, off) == 0.0);
  CHECK(scheme_sumrate(DescriptionIIIParams{}, off) == 0.0);

  CHECK_THROWS_AS(build_joint_cov(DescriptionIParams{5.0 * Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Zero(), false}, net),
                  std::invalid_argument);
}

TEST_CASE("zero link capacities give zero sum rate") {
  CranNetwork net = CranNetwork::symmetric(10.0, 0.5, -0.5, 0.0, 0.0);
  Eigen::Matrix2d k = 2.5 * Eigen::Matrix2d::Identity();
  CHECK(scheme_sumrate(DescriptionIParams{k, k, false}, net) == 0.0);
  DescriptionIIParams q2;
  q2.a << 1, 1, 1, 1;
  q2.b << 1, -1, 1, 1;
  CHECK(scheme_sumrate(q2, net) == 0.0);
  CHECK(scheme_sumrate(DescriptionIIIParams{k, k, Eigen::Matrix2d::Zero()}, net) == 0.0);
  CompressionParams qc{k, k, 0.5 * Eigen::Matrix2d::Identity()};
  CHECK(scheme_sumrate(qc, net) == 0.0);
}

TEST_CASE("compression sum rate is a boundary point of the explicit region") {
  std::mt19937_64 rng(9);
  CranNetwork net = CranNetwork::symmetric(10.0, 0.5, -0.5, 2.0, 0.5);
  ConstraintSystem t2 = gcomp_theorem2_region();
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::Matrix2d k1 = random_psd(rng, 3), k2 = random_psd(rng, 3), kw = random_psd(rng, 0.3);
    Eigen::Matrix2d sum = k1 + k2 + kw;
    double worst = std::max(sum(0, 0), sum(1, 1));
    if (worst > net.P) k1 *= net.P / worst, k2 *= net.P / worst, kw *= net.P / worst;
    CompressionParams q{k1, k2, kw};
    Eigen::Matrix2d l1 = k1.llt().matrixL();
    q.x0cov.segment<2>(0) = 0.3 * l1.col(0);  // weakly correlated cloud center
    JointCovariance cov = build_joint_cov(q, net);
    AtomValuation v = gaussian_atom_valuation(cov, information_atoms(t2),
                                              {{"C1", 2.0}, {"C2", 2.0}, {"C12", 0.5}, {"C21", 0.5}});
    for (const char* c : {"C1", "C2"}) v[c] = 2.0;
    v["C12"] = v["C21"] = 0.5;
    double s = scheme_sumrate(q, net);
    NumericSystem r = resolve(t2, v);
    CHECK(max_sum_rate(r) == doctest::Approx(s).epsilon(1e-12));
    if (s > 0) {
      // Some split of s lies in the region; nothing beyond s does.
      bool inside = false;
      for (int i = 0; i <= 1000 && !inside; ++i) inside = r.contains({s * i / 1000.0, s - s * i / 1000.0}, 1e-9);
      CHECK(inside);
      for (int i = 0; i <= 100; ++i) {
        double t = s + 1e-6;
        CHECK_FALSE(r.contains({t * i / 100.0, t - t * i / 100.0}, 0.0));
      }
    }
  }
}

TEST_CASE("pattern search finds a smooth maximum") {
  auto f = [](const std::vector<double>& x) { return -(x[0] - 1.2) * (x[0] - 1.2) - 2 * (x[1] + 0.4) * (x[1] + 0.4); };
  auto box = [](std::vector<double>& x) {
    for (auto& v : x) v = std::clamp(v, -1.0, 1.0);
  };
  PatternSearchResult r = pattern_search(f, {0.0, 0.0}, box, 0.5, 1e-8, 100000);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.x[1] == doctest::Approx(-0.4).epsilon(1e-7));
}

TEST_CASE("sum capacity with unlimited fronthaul") {
  OptimizerBudget budget{16, 20000, 7};
  CranNetwork eye = CranNetwork::symmetric(3.0, 0.0, 0.0, 1.0, 0.0);
  CHECK(rsum_star(eye, budget) == doctest::Approx(2.0).epsilon(1e-6));

  // Only user 1 is reachable: coherent beamforming with per-antenna power.
  CranNetwork one = eye;
  one.G << 1.0, -0.7, 0.0, 0.0;
  one.P = 5.0;
  CHECK(rsum_star(one, budget) == doctest::Approx(half_log(1 + 5.0 * 1.7 * 1.7)).epsilon(1e-6));

  for (double g21 : {0.5, -0.5}) {
    CranNetwork paper = CranNetwork::symmetric(100.0, 0.5, g21, 1.0, 0.0);
    double grid = rank_one_grid(paper.G, paper.P, 0.01);
    double opt = rsum_star(paper, budget);
    CHECK(opt >= grid - 1e-9);
    CHECK(opt == doctest::Approx(grid).epsilon(1e-3 / grid));
  }
  CranNetwork off = CranNetwork::symmetric(0.0, 0.5, 0.5, 1.0, 0.0);
  CHECK(rsum_star(off, budget) == 0.0);
}

TEST_CASE("optimized common-message scheme matches its closed form") {
  OptimizerBudget budget{16, 20000, 11};
  CranNetwork net = CranNetwork::symmetric(10.0, 0.5, -0.5, 1.0, 0.0);
  double rstar = rsum_star(net, budget);
  CHECK(rstar > 1.0);
  CHECK(optimize_scheme(GaussianScheme::GdsI, net, budget).sum_rate == doctest::Approx(1.0).epsilon(1e-9));

  CranNetwork wide = CranNetwork::symmetric(10.0, 0.5, -0.5, rstar + 1.0, 0.0);
  CHECK(optimize_scheme(GaussianScheme::GdsI, wide, budget).sum_rate == doctest::Approx(rstar).epsilon(1e-3));

  CranNetwork off = CranNetwork::symmetric(0.0, 0.5, -0.5, 2.0, 1.0);
  for (auto s : {GaussianScheme::GdsI, GaussianScheme::GdsII, GaussianScheme::GdsIII, GaussianScheme::GComp})
    CHECK(optimize_scheme(s, off, {4, 2000, 1}).sum_rate == 0.0);
}

TEST_CASE("optimizer determinism, budget monotonicity and the cut-set ceiling") {
  CranNetwork net = CranNetwork::symmetric(10.0, 0.5, 0.5, 1.5, 0.5);
  const double rstar = rsum_star(net, {16, 20000, 2});
  const double cut = cutset_symmetric_sumrate(1.5, rstar);
  for (auto s : {GaussianScheme::GdsII, GaussianScheme::GdsIII, GaussianScheme::GComp}) {
    SchemeEvaluation small = optimize_scheme(s, net, {3, 4000, 5});
    SchemeEvaluation again = optimize_scheme(s, net, {3, 4000, 5});
    SchemeEvaluation large = optimize_scheme(s, net, {6, 4000, 5});
    CHECK(small.sum_rate == again.sum_rate);
    CHECK(small.theta == again.theta);
    CHECK(large.sum_rate >= small.sum_rate);
    CHECK(large.sum_rate <= cut + 1e-3);
    CHECK(scheme_sumrate(large.params, net) == doctest::Approx(large.sum_rate).epsilon(1e-12));
    // A warm start from the best point cannot lose ground.
    SchemeEvaluation warm = optimize_scheme(s, net, {1, 4000, 99}, {large.theta});
    CHECK(warm.sum_rate >= large.sum_rate);
  }
  SchemeEvaluation ts = optimize_scheme(GaussianScheme::GdsTimeShare, net, {3, 4000, 5});
  for (auto s : {GaussianScheme::GdsI, GaussianScheme::GdsII, GaussianScheme::GdsIII})
    CHECK(ts.sum_rate >= optimize_scheme(s, net, {3, 4000, 5}).sum_rate);
}

TEST_CASE("thread count does not change results") {
  CranNetwork net = CranNetwork::symmetric(10.0, 0.5, -0.5, 1.5, 0.5);
  setenv("CRANRATE_THREADS", "1", 1);
  SchemeEvaluation a = optimize_scheme(GaussianScheme::GdsII, net, {4, 3000, 8});
  setenv("CRANRATE_THREADS", "3", 1);
  SchemeEvaluation b = optimize_scheme(GaussianScheme::GdsII, net, {4, 3000, 8});
  unsetenv("CRANRATE_THREADS");
  CHECK(a.sum_rate == b.sum_rate);
  CHECK(a.theta == b.theta);
  CHECK(a.best_restart == b.best_restart);
}

TEST_CASE("compression optimizer leaves the infeasible plateau") {
  // Hand-picked parameters give a positive sum rate at low power; the
  // optimizer must do at least as well from random starts.
  CranNetwork net = CranNetwork::symmetric(1.0, 0.5, 0.5, 1.5, 0.0);
  CompressionParams q{0.4 * Eigen::Matrix2d::Identity(), 0.4 * Eigen::Matrix2d::Identity(),
                      0.1 * Eigen::Matrix2d::Identity()};
  const double hand = scheme_sumrate(q, net);
  CHECK(hand > 0.25);
  SchemeEvaluation e = optimize_scheme(GaussianScheme::GComp, net, {8, 20000, 3});
  CHECK(e.sum_rate >= hand);
  CHECK(scheme_sumrate(e.params, net) == doctest::Approx(e.sum_rate).epsilon(1e-12));
}
