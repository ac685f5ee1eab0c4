#include "cranrate/gaussian_schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cranrate/parallel.hpp"
#include "cranrate/scheme_regions.hpp"

namespace cranrate {

std::string scheme_name(GaussianScheme s) {
  switch (s) {
    case GaussianScheme::GdsI: return "GDS-I";
    case GaussianScheme::GdsII: return "GDS-II";
    case GaussianScheme::GdsIII: return "GDS-III";
    case GaussianScheme::GComp: return "GCOMP";
    case GaussianScheme::GdsTimeShare: return "GDS-TS";
  }
  return "?";
}

GaussianScheme scheme_from_name(const std::string& name) {
  for (auto s : {GaussianScheme::GdsI, GaussianScheme::GdsII, GaussianScheme::GdsIII, GaussianScheme::GComp,
                 GaussianScheme::GdsTimeShare})
    if (scheme_name(s) == name) return s;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

Eigen::Matrix2d dirty_paper_precoder(const Eigen::Matrix2d& k, const Eigen::RowVector2d& g, const Eigen::Matrix2d& extra) {
  double denom = 1.0 + g * (k + extra) * g.transpose();
  return k * g.transpose() * g / denom;
}

namespace {

using Eigen::MatrixXd;

void check_network(const CranNetwork& net) {
  net.validate();
  if (net.N() != 2 || net.L() != 2) throw std::invalid_argument("scheme evaluation needs a 2-BS 2-user network");
}

// Components as linear maps of a base vector with covariance sb.
struct LinearModel {
  std::vector<Component> comps;
  std::vector<MatrixXd> maps;
  void add(const std::string& name, MatrixXd m) {
    comps.push_back({name, static_cast<std::size_t>(m.rows())});
    maps.push_back(std::move(m));
  }
  JointCovariance build(const MatrixXd& sb) const {
    Eigen::Index rows = 0;
    for (const auto& m : maps) rows += m.rows();
    MatrixXd t(rows, sb.rows());
    Eigen::Index r = 0;
    for (const auto& m : maps) {
      t.middleRows(r, m.rows()) = m;
      r += m.rows();
    }
    return JointCovariance(comps, t * sb * t.transpose());
  }
};

MatrixXd row(const MatrixXd& m, int i) { return m.row(i); }

void add_outputs(LinearModel& lm, const MatrixXd& x_map, const MatrixXd& g, Eigen::Index noise_at) {
  lm.add("X1", row(x_map, 0));
  lm.add("X2", row(x_map, 1));
  MatrixXd y = g * x_map;
  y.block(0, noise_at, 2, 2) += Eigen::Matrix2d::Identity();
  lm.add("Y1", row(y, 0));
  lm.add("Y2", row(y, 1));
}

void check_power(const MatrixXd& kx, double p) {
  for (int i = 0; i < 2; ++i)
    if (kx(i, i) > p * (1 + 1e-9) + 1e-12) throw std::invalid_argument("input violates the per-BS power limit");
}

MatrixXd block_diag(const std::vector<MatrixXd>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  MatrixXd out = MatrixXd::Zero(n, n);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return out;
}

struct BuildVisitor {
  const CranNetwork& net;

  JointCovariance operator()(const DescriptionIParams& p) const {
    // base: S1 (0-1), S2 (2-3), noise (4-5)
    const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    MatrixXd s1 = MatrixXd::Zero(2, 6), s2 = MatrixXd::Zero(2, 6);
    s1.block(0, 0, 2, 2) = I;
    s2.block(0, 2, 2, 2) = I;
    LinearModel lm;
    if (!p.swap_order) {
      Eigen::Matrix2d a = dirty_paper_precoder(p.K2, net.G.row(1));
      lm.add("U0", s1);
      lm.add("V0", s2 + a * s1);
    } else {
      Eigen::Matrix2d a = dirty_paper_precoder(p.K1, net.G.row(0));
      lm.add("U0", s1 + a * s2);
      lm.add("V0", s2);
    }
    MatrixXd x = s1 + s2;
    check_power(p.K1 + p.K2, net.P);
    add_outputs(lm, x, net.G, 4);
    return lm.build(block_diag({p.K1, p.K2, I}));
  }

  JointCovariance operator()(const DescriptionIIParams& p) const {
    // base: U0 V0 U1 V1 U2 V2 (0-5), noise (6-7)
    LinearModel lm;
    const char* names[] = {"U0", "V0", "U1", "V1", "U2", "V2"};
    for (int i = 0; i < 6; ++i) {
      MatrixXd e = MatrixXd::Zero(1, 8);
      e(0, i) = 1.0;
      lm.add(names[i], e);
    }
    MatrixXd x = MatrixXd::Zero(2, 8);
    x(0, 0) = p.a(0), x(0, 1) = p.a(1), x(0, 2) = p.a(2), x(0, 3) = p.a(3);
    x(1, 0) = p.b(0), x(1, 1) = p.b(1), x(1, 4) = p.b(2), x(1, 5) = p.b(3);
    if (p.a.squaredNorm() > net.P * (1 + 1e-9) + 1e-12 || p.b.squaredNorm() > net.P * (1 + 1e-9) + 1e-12)
      throw std::invalid_argument("input violates the per-BS power limit");
    add_outputs(lm, x, net.G, 6);
    return lm.build(MatrixXd::Identity(8, 8));
  }

  JointCovariance operator()(const DescriptionIIIParams& p) const {
    const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    MatrixXd s1 = MatrixXd::Zero(2, 6), s2 = MatrixXd::Zero(2, 6);
    s1.block(0, 0, 2, 2) = I;
    s2.block(0, 2, 2, 2) = I;
    MatrixXd v = s2 + p.A * s1;
    LinearModel lm;
    lm.add("U1", row(s1, 0));
    lm.add("U2", row(s1, 1));
    lm.add("V1", row(v, 0));
    lm.add("V2", row(v, 1));
    Eigen::Matrix2d ia = I + p.A;
    check_power(ia * p.K1 * ia.transpose() + p.K2, net.P);
    add_outputs(lm, s1 + v, net.G, 4);
    return lm.build(block_diag({p.K1, p.K2, I}));
  }

  JointCovariance operator()(const CompressionParams& p) const {
    // base: S1 (0-1), S2 (2-3), W (4-5), X0 (6), noise (7-8)
    const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    MatrixXd s1 = MatrixXd::Zero(2, 9), s2 = MatrixXd::Zero(2, 9), w = MatrixXd::Zero(2, 9);
    s1.block(0, 0, 2, 2) = I;
    s2.block(0, 2, 2, 2) = I;
    w.block(0, 4, 2, 2) = I;
    MatrixXd x0 = MatrixXd::Zero(1, 9);
    x0(0, 6) = 1.0;
    Eigen::Matrix2d a = dirty_paper_precoder(p.K2, net.G.row(1), p.Kw);
    LinearModel lm;
    lm.add("U1", s1);
    lm.add("U2", s2 + a * s1);
    lm.add("X0", x0);
    check_power(p.K1 + p.K2 + p.Kw, net.P);
    add_outputs(lm, s1 + s2 + w, net.G, 7);
    MatrixXd sb = block_diag({p.K1, p.K2, p.Kw, MatrixXd::Identity(1, 1), I});
    for (int i = 0; i < 6; ++i) sb(i, 6) = sb(6, i) = p.x0cov(i);
    return lm.build(sb);
  }
};

std::map<std::string, double> capacities(const CranNetwork& net) {
  return {{"C1", net.C(0)}, {"C2", net.C(1)}, {"C12", net.Ccoop(0, 1)}, {"C21", net.Ccoop(1, 0)}};
}

struct RegionCache {
  ConstraintSystem region;
  std::vector<std::string> atoms;
  explicit RegionCache(ConstraintSystem r) : region(std::move(r)), atoms(information_atoms(region)) {}
};

const RegionCache& region_for(std::size_t variant) {
  static const RegionCache cache[] = {RegionCache(scheme1_region()), RegionCache(scheme2_region()),
                                      RegionCache(scheme3_region()), RegionCache(gcomp_theorem2_region())};
  return cache[variant];
}

std::vector<std::string> scheme3_condition_atoms() {
  std::vector<std::string> out;
  for (const auto& c : scheme3_side_conditions())
    for (const auto* e : {&c.lhs, &c.rhs})
      for (const auto& [a, q] : e->terms) out.push_back(a);
  return out;
}

// ---------------------------------------------------------------------------
// Optimizer coordinates. Each BS's share of the transmit covariance is one
// row of stacked factors; a row is written as sqrt(P s) times a unit vector in
// hyperspherical angles, so the per-BS power limit is the box 0 <= s <= 1 and
// never couples coordinates.

// Point on the sphere of radius r in R^m from m - 1 angles.
std::vector<double> sphere(double r, const double* angles, std::size_t m) {
  std::vector<double> x(m);
  double carry = r;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    x[i] = carry * std::cos(angles[i]);
    carry *= std::sin(angles[i]);
  }
  x[m - 1] = carry;
  return x;
}

// Rows of lengths m0 and m1 starting at t[at]: [s0, angles0..., s1, angles1...].
std::pair<std::vector<double>, std::vector<double>> power_rows(const std::vector<double>& t, std::size_t at,
                                                               std::size_t m0, std::size_t m1, double p) {
  auto r0 = sphere(std::sqrt(p * t[at]), &t[at + 1], m0);
  auto r1 = sphere(std::sqrt(p * t[at + m0]), &t[at + m0 + 1], m1);
  return {r0, r1};
}

void clamp_power(std::vector<double>& t, std::size_t at, std::size_t m0) {
  t[at] = std::clamp(t[at], 0.0, 1.0);
  t[at + m0] = std::clamp(t[at + m0], 0.0, 1.0);
}

void clamp_ball(std::vector<double>& t, std::size_t at, std::size_t m) {
  double n2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) n2 += t[at + i] * t[at + i];
  if (n2 > 1.0) {
    double s = 1.0 / std::sqrt(n2);
    for (std::size_t i = 0; i < m; ++i) t[at + i] *= s;
  }
}

struct Codec {
  std::size_t dim = 0;
  std::size_t power_coords = 0;  // leading coordinates holding the power rows
  std::function<void(std::vector<double>&)> project;
  std::function<SchemeParams(const std::vector<double>&)> decode;
};

Codec make_codec(GaussianScheme scheme, std::size_t variant, double p) {
  Codec c;
  switch (scheme) {
    case GaussianScheme::GdsI:
      // Row 0 of [L1 L2] = (l1_00, l2_00); row 1 = (l1_10, l1_11, l2_10, l2_11).
      c.dim = c.power_coords = 6;
      c.project = [](std::vector<double>& t) { clamp_power(t, 0, 2); };
      c.decode = [variant, p](const std::vector<double>& t) -> SchemeParams {
        auto [r0, r1] = power_rows(t, 0, 2, 4, p);
        Eigen::Matrix2d l1, l2;
        l1 << r0[0], 0.0, r1[0], r1[1];
        l2 << r0[1], 0.0, r1[2], r1[3];
        return DescriptionIParams{l1 * l1.transpose(), l2 * l2.transpose(), variant == 1};
      };
      break;
    case GaussianScheme::GdsII:
      // a and b each on a sphere of radius sqrt(P s).
      c.dim = c.power_coords = 8;
      c.project = [](std::vector<double>& t) { clamp_power(t, 0, 4); };
      c.decode = [p](const std::vector<double>& t) -> SchemeParams {
        auto [a, b] = power_rows(t, 0, 4, 4, p);
        DescriptionIIParams q;
        for (int i = 0; i < 4; ++i) q.a(i) = a[i], q.b(i) = b[i];
        return q;
      };
      break;
    case GaussianScheme::GdsIII:
      // Rows of [M L2] with M = (I + A) L1, then the four entries of A.
      c.dim = 11;
      c.power_coords = 7;
      c.project = [](std::vector<double>& t) { clamp_power(t, 0, 3); };
      c.decode = [p](const std::vector<double>& t) -> SchemeParams {
        auto [r0, r1] = power_rows(t, 0, 3, 4, p);
        Eigen::Matrix2d m, l2, a;
        m << r0[0], r0[1], r1[0], r1[1];
        l2 << r0[2], 0.0, r1[2], r1[3];
        a << t[7], t[8], t[9], t[10];
        Eigen::Matrix2d ia = Eigen::Matrix2d::Identity() + a;
        if (std::abs(ia.determinant()) < 1e-9) throw std::invalid_argument("singular I + A");
        Eigen::Matrix2d l1 = ia.inverse() * m;
        return DescriptionIIIParams{l1 * l1.transpose(), l2 * l2.transpose(), a};
      };
      break;
    case GaussianScheme::GComp:
      // Rows of [L1 L2 Lw] (3 and 6 entries), then beta in the unit ball.
      c.dim = 15;
      c.power_coords = 9;
      c.project = [](std::vector<double>& t) {
        clamp_power(t, 0, 3);
        clamp_ball(t, 9, 6);
      };
      c.decode = [p](const std::vector<double>& t) -> SchemeParams {
        auto [r0, r1] = power_rows(t, 0, 3, 6, p);
        Eigen::Matrix2d l1, l2, lw;
        l1 << r0[0], 0.0, r1[0], r1[1];
        l2 << r0[1], 0.0, r1[2], r1[3];
        lw << r0[2], 0.0, r1[4], r1[5];
        // X0 = beta . z + sqrt(1 - |beta|^2) z0 with S1 = L1 z1 etc., so
        // Cov(X0, S1) = L1 beta1.
        Eigen::Vector2d b1(t[9], t[10]), b2(t[11], t[12]), b3(t[13], t[14]);
        CompressionParams q{l1 * l1.transpose(), l2 * l2.transpose(), lw * lw.transpose()};
        q.x0cov.segment<2>(0) = l1 * b1;
        q.x0cov.segment<2>(2) = l2 * b2;
        q.x0cov.segment<2>(4) = lw * b3;
        return q;
      };
      break;
    case GaussianScheme::GdsTimeShare:
      throw std::logic_error("time sharing has no coordinates");
  }
  return c;
}

std::size_t variant_count(GaussianScheme s) { return s == GaussianScheme::GdsI ? 2 : 1; }

std::vector<double> random_start(std::mt19937_64& rng, const Codec& codec) {
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI), power(0.5, 1.0);
  std::normal_distribution<double> n(0.0, 0.5);
  std::vector<double> t(codec.dim);
  for (std::size_t i = 0; i < codec.dim; ++i) t[i] = i < codec.power_coords ? angle(rng) : n(rng);
  // Power coordinates sit at the head of each row.
  if (codec.power_coords == 6) t[0] = power(rng), t[2] = power(rng);
  if (codec.power_coords == 8) t[0] = power(rng), t[4] = power(rng);
  if (codec.power_coords == 7 || codec.power_coords == 9) t[0] = power(rng), t[3] = power(rng);
  codec.project(t);
  return t;
}
}  // namespace

JointCovariance build_joint_cov(const SchemeParams& params, const CranNetwork& network) {
  check_network(network);
  return std::visit(BuildVisitor{network}, params);
}

namespace {

// Sum rate when the scheme's region meets the quadrant; otherwise a negative
// distance to feasibility (side-condition violation, or the most violated
// constraint at the origin) so the optimizer is not stuck on a flat zero.
double signed_sumrate(const SchemeParams& params, const CranNetwork& network) {
  JointCovariance cov = build_joint_cov(params, network);
  const std::size_t variant = params.index();
  const RegionCache& rc = region_for(variant);
  AtomValuation v = gaussian_atom_valuation(cov, rc.atoms, capacities(network));
  for (const auto& [k, x] : capacities(network)) v[k] = x;
  if (variant == 2) {
    static const std::vector<SideCondition> conds = scheme3_side_conditions();
    static const std::vector<std::string> side = scheme3_condition_atoms();
    for (const auto& [k, x] : gaussian_atom_valuation(cov, side)) v.emplace(k, x);
    if (!scheme3_feasible(v)) {
      double worst = 0.0;
      for (const auto& c : conds) worst = std::max(worst, c.lhs.evaluate(v) - c.rhs.evaluate(v));
      return -worst;
    }
  }
  NumericSystem r = resolve(rc.region, v);
  const double origin = r.min_slack(std::vector<double>(r.variables.size(), 0.0));
  if (origin < 0.0) return origin;
  return max_sum_rate(r);
}

}  // namespace

double scheme_sumrate(const SchemeParams& params, const CranNetwork& network) {
  return std::max(0.0, signed_sumrate(params, network));
}

PatternSearchResult pattern_search(const std::function<double(const std::vector<double>&)>& f,
                                   std::vector<double> x0,
                                   const std::function<void(std::vector<double>&)>& project, double step0,
                                   double min_step, std::size_t max_evals) {
  PatternSearchResult r;
  project(x0);
  r.x = std::move(x0);
  r.value = f(r.x);
  r.evaluations = 1;
  double step = step0;
  while (step >= min_step && r.evaluations < max_evals) {
    bool improved = false;
    for (std::size_t i = 0; i < r.x.size() && r.evaluations < max_evals; ++i)
      for (double dir : {1.0, -1.0}) {
        std::vector<double> y = r.x;
        y[i] += dir * step;
        project(y);
        double fy = f(y);
        ++r.evaluations;
        if (fy > r.value) {
          r.x = std::move(y);
          r.value = fy;
          improved = true;
          break;
        }
      }
    if (!improved) step *= 0.5;
  }
  return r;
}

namespace {

struct RestartOutcome {
  std::vector<double> theta;  // coordinates followed by the variant index
  double value = -1.0;
  std::size_t evaluations = 0;
};

// Runs every restart (random starts, then warm starts) and keeps the best,
// lowest index first on ties.
template <class MakeStart>
RestartOutcome multistart(std::size_t n_random, const std::vector<std::vector<double>>& warm, MakeStart make_start,
                          std::size_t* best_index, std::size_t* total_evals) {
  const std::size_t n = n_random + warm.size();
  std::vector<RestartOutcome> out(n);
  parallel_for(n, [&](std::size_t r) { out[r] = r < n_random ? make_start(r, nullptr) : make_start(r, &warm[r - n_random]); });
  std::size_t best = 0;
  *total_evals = 0;
  for (std::size_t r = 0; r < n; ++r) {
    *total_evals += out[r].evaluations;
    if (out[r].value > out[best].value) best = r;
  }
  *best_index = best;
  return n ? out[best] : RestartOutcome{};
}

std::seed_seq restart_seed(std::uint64_t seed, std::size_t r, std::uint64_t salt) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(salt)};
}

}  // namespace

SchemeEvaluation optimize_scheme(GaussianScheme scheme, const CranNetwork& network, const OptimizerBudget& budget,
                                 const std::vector<std::vector<double>>& warm_starts) {
  check_network(network);
  if (scheme == GaussianScheme::GdsTimeShare) {
    SchemeEvaluation best;
    best.sum_rate = -1.0;
    std::size_t evals = 0;
    for (auto s : {GaussianScheme::GdsI, GaussianScheme::GdsII, GaussianScheme::GdsIII}) {
      std::vector<std::vector<double>> warm;
      for (const auto& w : warm_starts) {
        Codec c = make_codec(s, 0, network.P);
        if (w.size() == c.dim + 1) warm.push_back(w);
      }
      SchemeEvaluation e = optimize_scheme(s, network, budget, warm);
      evals += e.evaluations;
      if (e.sum_rate > best.sum_rate) best = e;
    }
    best.evaluations = evals;
    best.scheme = GaussianScheme::GdsTimeShare;
    return best;
  }

  const double p = network.P;
  const std::size_t variants = variant_count(scheme);
  std::vector<Codec> codecs;
  for (std::size_t v = 0; v < variants; ++v) codecs.push_back(make_codec(scheme, v, p));
  const std::size_t dim = codecs[0].dim;

  auto objective = [&](const Codec& c, const std::vector<double>& t) {
    try {
      return signed_sumrate(c.decode(t), network);
    } catch (const std::invalid_argument&) {
      return -1e9;
    }
  };
  auto run = [&](std::size_t r, const std::vector<double>* warm) {
    RestartOutcome o;
    std::size_t variant = r % variants;
    std::vector<double> start;
    if (warm) {
      start.assign(warm->begin(), warm->begin() + static_cast<std::ptrdiff_t>(dim));
      variant = static_cast<std::size_t>(warm->back()) % variants;
    } else {
      std::seed_seq sq = restart_seed(budget.seed, r, static_cast<std::uint64_t>(scheme));
      std::mt19937_64 rng(sq);
      start = random_start(rng, codecs[variant]);
    }
    const Codec& c = codecs[variant];
    auto f = [&](const std::vector<double>& t) { return objective(c, t); };
    PatternSearchResult ps =
        pattern_search(f, start, c.project, 0.25, 1e-5, budget.max_evals);
    o.theta = ps.x;
    o.theta.push_back(static_cast<double>(variant));
    o.value = ps.value;
    o.evaluations = ps.evaluations;
    return o;
  };

  std::vector<std::vector<double>> warm;
  for (const auto& w : warm_starts)
    if (w.size() == dim + 1) warm.push_back(w);
  SchemeEvaluation e;
  e.scheme = scheme;
  RestartOutcome best = multistart(budget.restarts, warm, run, &e.best_restart, &e.evaluations);
  e.restarts = budget.restarts + warm.size();
  if (best.theta.empty()) {
    best.theta.assign(dim + 1, 0.0);
    best.value = 0.0;
  }
  e.theta = best.theta;
  std::vector<double> coords(best.theta.begin(), best.theta.end() - 1);
  e.params = codecs[static_cast<std::size_t>(best.theta.back())].decode(coords);
  e.sum_rate = std::max(0.0, best.value);
  return e;
}

double gds_timeshare_sumrate(const CranNetwork& network, const OptimizerBudget& budget) {
  return optimize_scheme(GaussianScheme::GdsTimeShare, network, budget).sum_rate;
}

double dpc_sumrate(const Eigen::MatrixXd& g, const Eigen::Matrix2d& k1, const Eigen::Matrix2d& k2, bool swap) {
  // First-encoded user sees the later user's signal as noise; the later user
  // is precoded against the first.
  const Eigen::RowVector2d g1 = g.row(swap ? 1 : 0), g2 = g.row(swap ? 0 : 1);
  const Eigen::Matrix2d& ka = swap ? k2 : k1;  // first-encoded user
  const Eigen::Matrix2d& kb = swap ? k1 : k2;
  double first = 0.5 * std::log2((1.0 + g1 * (ka + kb) * g1.transpose()) / (1.0 + g1 * kb * g1.transpose()));
  double second = 0.5 * std::log2(1.0 + g2 * kb * g2.transpose());
  return first + second;
}

double rsum_star(const CranNetwork& network, const OptimizerBudget& budget) {
  check_network(network);
  const double p = network.P;
  if (p == 0.0) return 0.0;
  Codec codec = make_codec(GaussianScheme::GdsI, 0, p);
  auto covariances = [&](const std::vector<double>& t) { return std::get<DescriptionIParams>(codec.decode(t)); };
  auto run = [&](std::size_t r, const std::vector<double>*) {
    const bool swap = r % 2 == 1;
    std::seed_seq sq = restart_seed(budget.seed, r, 0x5eed);
    std::mt19937_64 rng(sq);
    auto f = [&](const std::vector<double>& t) {
      DescriptionIParams k = covariances(t);
      return dpc_sumrate(network.G, k.K1, k.K2, swap);
    };
    PatternSearchResult ps = pattern_search(f, random_start(rng, codec), codec.project, 0.25, 1e-7, budget.max_evals);
    RestartOutcome o;
    o.value = ps.value;
    o.evaluations = ps.evaluations;
    o.theta = ps.x;
    return o;
  };
  std::size_t idx = 0, evals = 0;
  return multistart(std::max<std::size_t>(budget.restarts, 2), {}, run, &idx, &evals).value;
}

}  // namespace cranrate
