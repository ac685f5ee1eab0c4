#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cranrate/gaussian_info.hpp"

namespace cranrate {

// Schemes evaluated on the 2-BS 2-user Gaussian network. GdsTimeShare is the
// best of the three data-sharing variants.
enum class GaussianScheme { GdsI, GdsII, GdsIII, GComp, GdsTimeShare };

std::string scheme_name(GaussianScheme s);  // "GDS-I", "GDS-II", "GDS-III", "GCOMP", "GDS-TS"
GaussianScheme scheme_from_name(const std::string& name);

// Common auxiliaries U0 = S1, V0 = S2 + A S1 with the dirty-paper precoder
// for user 2. With swap_order the roles flip: V0 = S2, U0 = S1 + A' S2.
struct DescriptionIParams {
  Eigen::Matrix2d K1 = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d K2 = Eigen::Matrix2d::Zero();
  bool swap_order = false;
};

// Six iid N(0,1) auxiliaries; X1 = a.(U0,V0,U1,V1), X2 = b.(U0,V0,U2,V2).
struct DescriptionIIParams {
  Eigen::Vector4d a = Eigen::Vector4d::Zero();
  Eigen::Vector4d b = Eigen::Vector4d::Zero();
};

// Private auxiliaries (U1,U2) = S1, (V1,V2) = S2 + A S1, X = (I+A) S1 + S2.
struct DescriptionIIIParams {
  Eigen::Matrix2d K1 = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d K2 = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
};

// U1 = S1, U2 = S2 + A S1 with A computed from K2 + Kw, X = S1 + S2 + W and a
// unit-variance X0 whose covariance with (S1, S2, W) is x0cov.
struct CompressionParams {
  Eigen::Matrix2d K1 = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d K2 = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d Kw = Eigen::Matrix2d::Zero();
  Eigen::Matrix<double, 6, 1> x0cov = Eigen::Matrix<double, 6, 1>::Zero();
};

using SchemeParams = std::variant<DescriptionIParams, DescriptionIIParams, DescriptionIIIParams, CompressionParams>;

// K g^T (1 + g (K + Kextra) g^T)^{-1} g for a 1 x 2 row g.
Eigen::Matrix2d dirty_paper_precoder(const Eigen::Matrix2d& k, const Eigen::RowVector2d& g,
                                     const Eigen::Matrix2d& extra = Eigen::Matrix2d::Zero());

// Joint covariance over the scheme's auxiliaries, X1, X2, Y1, Y2 (unit
// channel noise). Throws std::invalid_argument on a power violation or a
// non-PSD law.
JointCovariance build_joint_cov(const SchemeParams& params, const CranNetwork& network);

// Largest R1 + R2 in the scheme's region at these parameters.
double scheme_sumrate(const SchemeParams& params, const CranNetwork& network);

struct OptimizerBudget {
  std::size_t restarts = 64;
  std::size_t max_evals = 20000;  // per restart
  std::uint64_t seed = 1;
};

struct SchemeEvaluation {
  GaussianScheme scheme = GaussianScheme::GdsI;
  SchemeParams params;
  std::vector<double> theta;  // optimizer coordinates of params
  double sum_rate = 0.0;
  std::size_t restarts = 0;
  std::size_t best_restart = 0;
  std::size_t evaluations = 0;
};

// Seeded multistart pattern search. Warm starts (optimizer coordinates from an
// earlier result) run as extra restarts after the random ones. GdsTimeShare
// optimizes the three data-sharing schemes and keeps the best.
SchemeEvaluation optimize_scheme(GaussianScheme scheme, const CranNetwork& network, const OptimizerBudget& budget,
                                 const std::vector<std::vector<double>>& warm_starts = {});

double gds_timeshare_sumrate(const CranNetwork& network, const OptimizerBudget& budget);

// Dirty-paper sum rate with user 2 encoded against user 1 (swap: the reverse).
double dpc_sumrate(const Eigen::MatrixXd& g, const Eigen::Matrix2d& k1, const Eigen::Matrix2d& k2, bool swap = false);

// Sum capacity of the second hop with unlimited fronthaul: best dirty-paper
// sum rate over both encoding orders and per-antenna power P.
double rsum_star(const CranNetwork& network, const OptimizerBudget& budget = {});

// Coordinate pattern search maximizing f. project maps any point to a
// feasible one; the step halves when no coordinate move improves.
struct PatternSearchResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
};
PatternSearchResult pattern_search(const std::function<double(const std::vector<double>&)>& f,
                                   std::vector<double> x0,
                                   const std::function<void(std::vector<double>&)>& project, double step0,
                                   double min_step = 1e-5, std::size_t max_evals = 20000);

}  // namespace cranrate
