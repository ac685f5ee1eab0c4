#include "cranrate/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "json.hpp"

#include "cranrate/scheme_regions.hpp"

namespace cranrate {

namespace {

using nlohmann::json;

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

std::vector<double> number_list(const json& j, const std::string& field, bool allow_scalar) {
  std::vector<double> out;
  if (allow_scalar && j.is_number()) return {number(j, field)};
  if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  if (out.empty()) throw ConfigError(field, "must not be empty");
  return out;
}

std::size_t count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 1) throw ConfigError(field, "expected a positive integer");
  return j.get<std::size_t>();
}

}  // namespace

SweepConfig sweep_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line/column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line, col = 1;
      else ++col;
    }
    throw ConfigError("<json>", "parse error at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  if (!j.is_object()) throw ConfigError("<json>", "expected an object");
  static const std::set<std::string> known{"P", "G", "C_grid", "T", "schemes", "budget", "seed"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError(k, "unknown field");
  for (const char* k : {"P", "G", "C_grid", "T", "schemes", "seed"})
    if (!j.contains(k)) throw ConfigError(k, "missing");

  SweepConfig c;
  c.P = number(j["P"], "P");
  if (c.P < 0) throw ConfigError("P", "must be >= 0");
  const json& g = j["G"];
  if (g.is_array() && g.size() == 2 && g[0].is_number()) {
    c.G << 1.0, number(g[0], "G[0]"), number(g[1], "G[1]"), 1.0;
  } else if (g.is_array() && g.size() == 2 && g[0].is_array()) {
    for (int r = 0; r < 2; ++r) {
      if (g[r].size() != 2) throw ConfigError("G", "expected a 2x2 matrix");
      for (int k = 0; k < 2; ++k)
        c.G(r, k) = number(g[r][k], "G[" + std::to_string(r) + "][" + std::to_string(k) + "]");
    }
  } else {
    throw ConfigError("G", "expected [[g11, g12], [g21, g22]] or [g12, g21]");
  }
  c.C_grid = number_list(j["C_grid"], "C_grid", false);
  c.T = number_list(j["T"], "T", true);
  for (double v : c.C_grid)
    if (v < 0) throw ConfigError("C_grid", "capacities must be >= 0");
  for (double v : c.T)
    if (v < 0) throw ConfigError("T", "capacities must be >= 0");
  if (!j["schemes"].is_array() || j["schemes"].empty()) throw ConfigError("schemes", "expected a nonempty array");
  for (std::size_t i = 0; i < j["schemes"].size(); ++i) {
    const std::string field = "schemes[" + std::to_string(i) + "]";
    if (!j["schemes"][i].is_string()) throw ConfigError(field, "expected a scheme name");
    try {
      c.schemes.push_back(scheme_from_name(j["schemes"][i].get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field, e.what());
    }
  }
  if (!j["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
  c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("budget")) {
    const json& b = j["budget"];
    if (b.is_object()) {
      for (const auto& [k, v] : b.items()) {
        if (k == "restarts") c.budget.restarts = count(v, "budget.restarts");
        else if (k == "max_evals") c.budget.max_evals = count(v, "budget.max_evals");
        else throw ConfigError("budget." + k, "unknown field");
      }
    } else {
      c.budget.restarts = count(b, "budget");
    }
  }
  c.budget.seed = c.seed;
  return c;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  if (config.schemes.empty()) throw ConfigError("schemes", "must not be empty");
  if (config.C_grid.empty()) throw ConfigError("C_grid", "must not be empty");
  if (config.T.empty()) throw ConfigError("T", "must not be empty");
  std::vector<double> cs = config.C_grid, ts = config.T;
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  auto net_at = [&](double c, double t) {
    CranNetwork n;
    n.G = config.G;
    n.P = config.P;
    n.C = Eigen::Vector2d(c, c);
    n.Ccoop.resize(2, 2);
    n.Ccoop << 0.0, t, t, 0.0;
    return n;
  };
  OptimizerBudget star_budget = config.budget;
  star_budget.restarts = std::max<std::size_t>(config.budget.restarts, 16);
  const double rstar = rsum_star(net_at(0.0, 0.0), star_budget);

  std::set<GaussianScheme> needed(config.schemes.begin(), config.schemes.end());
  if (needed.count(GaussianScheme::GdsTimeShare)) {
    needed.erase(GaussianScheme::GdsTimeShare);
    needed.insert({GaussianScheme::GdsI, GaussianScheme::GdsII, GaussianScheme::GdsIII});
  }
  // (scheme, T index, C index) -> sum rate
  std::map<std::tuple<GaussianScheme, std::size_t, std::size_t>, double> value;
  for (GaussianScheme s : needed)
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
      std::vector<std::vector<double>> warm;
      for (std::size_t ci = 0; ci < cs.size(); ++ci) {
        SchemeEvaluation e = optimize_scheme(s, net_at(cs[ci], ts[ti]), config.budget, warm);
        value[{s, ti, ci}] = e.sum_rate;
        warm = {e.theta};
      }
    }

  std::vector<SweepRow> rows;
  std::set<GaussianScheme> requested(config.schemes.begin(), config.schemes.end());
  for (std::size_t ci = 0; ci < cs.size(); ++ci)
    for (std::size_t ti = 0; ti < ts.size(); ++ti)
      for (GaussianScheme s : requested) {
        double v;
        if (s == GaussianScheme::GdsTimeShare) {
          v = std::max({value[{GaussianScheme::GdsI, ti, ci}], value[{GaussianScheme::GdsII, ti, ci}],
                        value[{GaussianScheme::GdsIII, ti, ci}]});
        } else {
          v = value[{s, ti, ci}];
        }
        rows.push_back({cs[ci], ts[ti], scheme_name(s), v, cutset_symmetric_sumrate(cs[ci], rstar), rstar});
      }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.C, a.T, a.scheme) < std::tie(b.C, b.T, b.scheme);
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "C,T,scheme,sum_rate,cutset,rsum_star\n";
  char buf[256];
  auto fix = [](double v) { return std::abs(v) < 5e-7 ? 0.0 : v; };  // no "-0.000000"
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%s,%.6f,%.6f,%.6f\n", fix(r.C), fix(r.T), r.scheme.c_str(),
                  fix(r.sum_rate), fix(r.cutset), fix(r.rsum_star));
    out += buf;
  }
  return out;
}

}  // namespace cranrate
