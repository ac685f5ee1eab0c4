// cranrate command-line front end. Exit codes: 0 pass, 1 verification
// failure, 2 usage or input error. Thread count: CRANRATE_THREADS only.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cranrate/discrete_info.hpp"
#include "cranrate/examples.hpp"
#include "cranrate/gap_audit.hpp"
#include "cranrate/polytope.hpp"
#include "cranrate/scheme_regions.hpp"
#include "cranrate/sweep.hpp"

using namespace cranrate;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + out_path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "C1=1,C2=0.5" -> map
std::map<std::string, double> parse_caps(const std::string& s) {
  std::map<std::string, double> caps{{"C1", 0.0}, {"C2", 0.0}, {"C12", 0.0}, {"C21", 0.0}};
  for (const auto& kv : split_names(s)) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--caps expects NAME=value pairs, got '" + kv + "'");
    std::string name = kv.substr(0, eq);
    if (!is_capacity_constant(name)) throw UsageError("unknown capacity " + name);
    try {
      caps[name] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("bad value in --caps: " + kv);
    }
  }
  return caps;
}

GdsRestriction restriction_from(const std::string& s) {
  static const std::map<std::string, GdsRestriction> m{{"scheme1", GdsRestriction::SchemeI},
                                                       {"scheme2", GdsRestriction::SchemeII},
                                                       {"scheme3", GdsRestriction::SchemeIII},
                                                       {"single-bs", GdsRestriction::SingleBs},
                                                       {"single-user", GdsRestriction::SingleUser}};
  auto it = m.find(s);
  if (it == m.end()) throw UsageError("unknown restriction " + s);
  return it->second;
}

// ---------------------------------------------------------------------------

struct RegionArgs {
  std::string system = "theorem2", project, lifted, pmf, caps, network, point, out;
  std::size_t nbs = 2, nusers = 2;
};

int cmd_region(const RegionArgs& a) {
  ConstraintSystem sys;
  if (a.system == "cutset") {
    if (a.network.empty()) throw UsageError("--system cutset needs --network");
    CranNetwork net = network_from_json(read_file(a.network));
    sys = cutset_region(net, net.P * Eigen::MatrixXd::Identity(net.N(), net.N()));
  } else if (a.system == "theorem1") {
    sys = gds_theorem1_system();
    if (!a.lifted.empty()) sys = gds_lifted(sys, restriction_from(a.lifted));
    else if (!a.project.empty()) sys = gds_project(sys, restriction_from(a.project));
  } else {
    static const std::map<std::string, ConstraintSystem (*)()> fixed{
        {"scheme1", scheme1_region}, {"scheme2", scheme2_region},       {"scheme3", scheme3_region},
        {"cor4", corollary4_region}, {"cor5", corollary5_region},       {"theorem2", gcomp_theorem2_region}};
    if (a.system == "ddf") sys = ddf_p1_region(a.nbs, a.nusers);
    else if (fixed.count(a.system)) sys = fixed.at(a.system)();
    else throw UsageError("unknown system " + a.system);
  }
  if ((!a.project.empty() || !a.lifted.empty()) && a.system != "theorem1")
    throw UsageError("--project and --lifted apply to --system theorem1");

  const bool numeric = !a.pmf.empty() || a.system == "cutset";
  if (!numeric) {
    if (!a.point.empty()) throw UsageError("--point needs --pmf");
    emit(format_system(sys), a.out);
    return kPass;
  }
  AtomValuation v;
  if (!a.pmf.empty()) {
    JointPmf pmf = pmf_from_json(read_file(a.pmf));
    v = atom_valuation(pmf, information_atoms(sys));
    for (const auto& [k, c] : parse_caps(a.caps)) v[k] = c;
  }
  nlohmann::json j = nlohmann::json::parse(region_to_json(sys, v));
  NumericSystem r = resolve(sys, v);
  if (r.variables.size() <= 2) j["max_sum_rate"] = max_sum_rate(r);
  int code = kPass;
  if (!a.point.empty()) {
    std::vector<double> pt;
    for (const auto& s : split_names(a.point)) pt.push_back(std::stod(s));
    if (pt.size() != r.variables.size()) throw UsageError("--point needs one value per rate variable");
    double slack = r.min_slack(pt);
    j["point"] = pt;
    j["min_slack"] = slack;
    j["member"] = slack >= -1e-9;
    if (slack < -1e-9) code = kFail;
  }
  emit(j.dump(2), a.out);
  return code;
}

int cmd_sweep(const std::string& config, const std::string& out) {
  SweepConfig c = sweep_config_from_json(read_file(config));
  emit(sweep_csv(run_sweep(c)), out);
  return kPass;
}

int cmd_gap(std::size_t instances, std::uint64_t seed, std::size_t nmax, std::size_t lmax, bool cuts,
            const std::string& out) {
  GapAuditSummary s = run_gap_audit(instances, seed, nmax, lmax);
  emit(gap_audit_json(s, seed, cuts), out);
  return s.pass ? kPass : kFail;
}

int cmd_fme(const std::string& in, const std::string& eliminate, const std::string& keep, const std::string& out) {
  ConstraintSystem sys;
  const std::string text = read_file(in);
  try {
    sys = parse_system(text);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    msg = msg.substr(msg.find(": ") + 2);  // location is already in the prefix
    throw UsageError(in + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + msg);
  }
  std::vector<std::string> elim = split_names(eliminate);
  if (!keep.empty()) {
    if (!elim.empty()) throw UsageError("use either --eliminate or --keep");
    std::vector<std::string> k = split_names(keep);
    for (const auto& v : sys.variables)
      if (std::find(k.begin(), k.end(), v) == k.end()) elim.push_back(v);
  }
  for (const auto& v : elim)
    if (!sys.has_variable(v)) throw UsageError("unknown variable " + v);
  if (!elim.empty()) sys = syntactic_reduce(fme_eliminate(sys, elim));
  emit(format_system(sys), out);
  return kPass;
}

struct ExampleArgs {
  int example = 0;
  std::size_t samples = 10000, ex1_samples = 4000, cardinality = 4;
  std::uint64_t seed = 1;
  std::string channel, out;
  double c1 = -1.0;
};

int cmd_examples(const ExampleArgs& a) {
  std::vector<ExampleReport> reps;
  if (a.example == 0 || a.example == 1) {
    Example1Budget b{a.ex1_samples, 8, a.cardinality, a.seed};
    if (!a.channel.empty()) {
      if (a.c1 < 0) throw UsageError("--channel needs --c1");
      reps.push_back(example1_run(channel_from_json(read_file(a.channel)), a.c1, b));
    } else {
      reps.push_back(example1_run(bsc(0.1), 0.3, b));
      reps.back().id = "example1-bsc0.1";
      reps.push_back(example1_run(bsc(0.0), 0.5, b));
      reps.back().id = "example1-noiseless";
    }
  }
  if (a.example == 0 || a.example == 2) {
    reps.push_back(example2_part_a());
    reps.push_back(example2_part_b({a.samples, a.seed}));
  }
  emit(reports_to_json(reps), a.out);
  return all_passed(reps) ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate regions, sum-rate sweeps and checks for two-hop cloud radio access networks"};
  app.require_subcommand(1);

  RegionArgs ra;
  auto* region = app.add_subcommand("region", "Print a rate region, symbolic or resolved against a pmf");
  region->add_option("--system", ra.system, "theorem1|scheme1|scheme2|scheme3|cor4|cor5|theorem2|ddf|cutset")
      ->capture_default_str();
  region->add_option("--project", ra.project, "theorem1 only: project under scheme1|scheme2|scheme3|single-bs|single-user");
  region->add_option("--lifted", ra.lifted, "theorem1 only: the pre-elimination system for a restriction");
  region->add_option("--nbs", ra.nbs, "ddf: number of BSs")->check(CLI::Range(1, 8));
  region->add_option("--nusers", ra.nusers, "ddf: number of users")->check(CLI::Range(1, 8));
  region->add_option("--pmf", ra.pmf, "JSON pmf to resolve the region against")->check(CLI::ExistingFile);
  region->add_option("--caps", ra.caps, "capacities, e.g. C1=1,C2=1,C12=0,C21=0 (default 0)");
  region->add_option("--network", ra.network, "JSON network (cutset)")->check(CLI::ExistingFile);
  region->add_option("--point", ra.point, "rate point to test, e.g. 1,1 (exit 1 if outside)");
  region->add_option("-o,--out", ra.out, "output file");

  std::string sweep_config, sweep_out;
  auto* sweep = app.add_subcommand("sumrate-sweep", "Optimize scheme sum rates over a C grid; CSV output");
  sweep->add_option("--config", sweep_config, "sweep JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--out", sweep_out, "CSV file (default stdout)");

  std::size_t instances = 200, nmax = 4, lmax = 4;
  std::uint64_t gap_seed = 1;
  bool cuts = false;
  std::string gap_out;
  auto* gap = app.add_subcommand("gap-audit", "Check the constant-gap relaxation on random networks");
  gap->add_option("--instances", instances)->capture_default_str();
  gap->add_option("--seed", gap_seed)->capture_default_str();
  gap->add_option("--nmax", nmax)->check(CLI::Range(1, 16))->capture_default_str();
  gap->add_option("--lmax", lmax)->check(CLI::Range(1, 16))->capture_default_str();
  gap->add_flag("--cuts", cuts, "include every cut in the report");
  gap->add_option("-o,--out", gap_out, "output file");

  std::string fme_in, fme_elim, fme_keep, fme_out;
  auto* fme = app.add_subcommand("fme", "Fourier-Motzkin projection of a system in text format");
  fme->add_option("--in", fme_in, "input system")->required()->check(CLI::ExistingFile);
  fme->add_option("--eliminate", fme_elim, "comma-separated variables to project out, in order");
  fme->add_option("--keep", fme_keep, "comma-separated variables to keep");
  fme->add_option("-o,--out", fme_out, "output file");

  ExampleArgs ea;
  auto* ex = app.add_subcommand("verify-examples", "Run the one-BS and Z-channel examples");
  ex->add_option("--example", ea.example, "1 or 2 (default both)")->check(CLI::IsMember({1, 2}));
  ex->add_option("--samples", ea.samples, "example 2 multicoding samples")->capture_default_str();
  ex->add_option("--ex1-samples", ea.ex1_samples, "example 1 random p(u,x) draws")->capture_default_str();
  ex->add_option("--cardinality", ea.cardinality, "example 1 cap on |U1|")->check(CLI::Range(1, 16))->capture_default_str();
  ex->add_option("--seed", ea.seed)->capture_default_str();
  ex->add_option("--channel", ea.channel, "example 1 channel JSON")->check(CLI::ExistingFile);
  ex->add_option("--c1", ea.c1, "example 1 fronthaul capacity");
  ex->add_option("-o,--out", ea.out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*region) return cmd_region(ra);
    if (*sweep) return cmd_sweep(sweep_config, sweep_out);
    if (*gap) return cmd_gap(instances, gap_seed, nmax, lmax, cuts, gap_out);
    if (*fme) return cmd_fme(fme_in, fme_elim, fme_keep, fme_out);
    if (*ex) return cmd_examples(ea);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "json error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
