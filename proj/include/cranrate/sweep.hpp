#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cranrate/gaussian_schemes.hpp"

namespace cranrate {

// Invalid sweep configuration; field() names the offending JSON key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Symmetric 2-BS 2-user sweep: C1 = C2 = C over C_grid, C12 = C21 = T.
struct SweepConfig {
  double P = 0.0;
  Eigen::Matrix2d G = Eigen::Matrix2d::Identity();
  std::vector<double> C_grid;
  std::vector<double> T;
  std::vector<GaussianScheme> schemes;
  OptimizerBudget budget;
  std::uint64_t seed = 0;
};

// {"P": p, "G": [[1, g12], [g21, 1]] or [g12, g21], "C_grid": [...],
//  "T": t or [...], "schemes": ["GDS-I", ...], "budget": n or
//  {"restarts": n, "max_evals": m}, "seed": s}. Throws ConfigError; parse
// errors report line and column.
SweepConfig sweep_config_from_json(const std::string& text);

struct SweepRow {
  double C = 0.0;
  double T = 0.0;
  std::string scheme;
  double sum_rate = 0.0;
  double cutset = 0.0;
  double rsum_star = 0.0;
};

// One row per (C, T, scheme), sorted by (C, T, scheme name). Each (T, scheme)
// curve is optimized in increasing C with the previous optimum as a warm
// start. GDS-TS is the pointwise best of the three data-sharing curves.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

// Header "C,T,scheme,sum_rate,cutset,rsum_star", six decimals per float.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace cranrate
