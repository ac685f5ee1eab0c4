// Python module cranrate._core. JSON travels as strings; the package
// __init__ turns them into dicts.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cranrate/discrete_info.hpp"
#include "cranrate/examples.hpp"
#include "cranrate/gap_audit.hpp"
#include "cranrate/gaussian_info.hpp"
#include "cranrate/gaussian_schemes.hpp"
#include "cranrate/polytope.hpp"
#include "cranrate/scheme_regions.hpp"
#include "cranrate/sweep.hpp"

namespace py = pybind11;
using namespace cranrate;

namespace {

ConstraintSystem named_system(const std::string& name, std::size_t nbs, std::size_t nusers) {
  if (name == "theorem1") return gds_theorem1_system();
  if (name == "scheme1") return scheme1_region();
  if (name == "scheme2") return scheme2_region();
  if (name == "scheme3") return scheme3_region();
  if (name == "cor4") return corollary4_region();
  if (name == "cor5") return corollary5_region();
  if (name == "theorem2") return gcomp_theorem2_region();
  if (name == "ddf") return ddf_p1_region(nbs, nusers);
  throw std::invalid_argument("unknown system " + name);
}

GdsRestriction restriction(const std::string& s) {
  if (s == "scheme1") return GdsRestriction::SchemeI;
  if (s == "scheme2") return GdsRestriction::SchemeII;
  if (s == "scheme3") return GdsRestriction::SchemeIII;
  if (s == "single-bs") return GdsRestriction::SingleBs;
  if (s == "single-user") return GdsRestriction::SingleUser;
  throw std::invalid_argument("unknown restriction " + s);
}

AtomValuation valuation_for(const ConstraintSystem& sys, const std::string& pmf_json,
                            const std::map<std::string, double>& caps) {
  AtomValuation v = atom_valuation(pmf_from_json(pmf_json), information_atoms(sys));
  for (const auto& [k, c] : caps) {
    if (!is_capacity_constant(k)) throw std::invalid_argument("unknown capacity " + k);
    v[k] = c;
  }
  for (const char* k : {"C1", "C2", "C12", "C21"}) v.emplace(k, 0.0);
  return v;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rate regions and checks for two-hop cloud radio access networks";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def("entropy", [](const std::string& pmf, const VarList& s) { return entropy(pmf_from_json(pmf), s); },
        py::arg("pmf_json"), py::arg("variables"));
  m.def(
      "mutual_info",
      [](const std::string& pmf, const VarList& a, const VarList& b, const VarList& c) {
        return mutual_info(pmf_from_json(pmf), a, b, c);
      },
      py::arg("pmf_json"), py::arg("a"), py::arg("b"), py::arg("given") = VarList{});
  m.def(
      "channel_capacity",
      [](const std::string& channel) {
        auto r = blahut_arimoto(channel_from_json(channel));
        return py::make_tuple(r.capacity, r.input_pmf);
      },
      py::arg("channel_json"), "Blahut-Arimoto capacity in bits and the optimizing input pmf.");

  m.def(
      "region_text",
      [](const std::string& name, const std::string& project, std::size_t nbs, std::size_t nusers) {
        ConstraintSystem s = named_system(name, nbs, nusers);
        if (!project.empty()) {
          if (name != "theorem1") throw std::invalid_argument("project applies to theorem1 only");
          s = gds_project(s, restriction(project));
        }
        return format_system(s);
      },
      py::arg("system"), py::arg("project") = "", py::arg("nbs") = 2, py::arg("nusers") = 2);
  m.def(
      "fme",
      [](const std::string& text, const std::vector<std::string>& eliminate) {
        return format_system(syntactic_reduce(fme_eliminate(parse_system(text), eliminate)));
      },
      py::arg("text"), py::arg("eliminate"));
  m.def(
      "region_json",
      [](const std::string& name, const std::string& pmf, const std::map<std::string, double>& caps,
         std::size_t nbs, std::size_t nusers) {
        ConstraintSystem s = named_system(name, nbs, nusers);
        return region_to_json(s, valuation_for(s, pmf, caps));
      },
      py::arg("system"), py::arg("pmf_json"), py::arg("caps") = std::map<std::string, double>{},
      py::arg("nbs") = 2, py::arg("nusers") = 2);
  m.def(
      "max_sum_rate",
      [](const std::string& name, const std::string& pmf, const std::map<std::string, double>& caps) {
        ConstraintSystem s = named_system(name, 2, 2);
        return max_sum_rate(resolve(s, valuation_for(s, pmf, caps)));
      },
      py::arg("system"), py::arg("pmf_json"), py::arg("caps") = std::map<std::string, double>{});
  m.def(
      "theorem1_margin",
      [](const std::string& pmf, const std::map<std::string, double>& caps, double r1, double r2) {
        return theorem1_margin(valuation_for(gds_theorem1_system(), pmf, caps), r1, r2);
      },
      py::arg("pmf_json"), py::arg("caps"), py::arg("r1"), py::arg("r2"),
      "Largest uniform slack of the multicoding system at (r1, r2); >= 0 means achievable.");

  m.def("capacity_logdet", &capacity_logdet, py::arg("G"), py::arg("K"));
  m.def(
      "optimize_scheme",
      [](const std::string& scheme, const std::string& network, std::size_t restarts, std::size_t max_evals,
         std::uint64_t seed) {
        SchemeEvaluation e =
            optimize_scheme(scheme_from_name(scheme), network_from_json(network), {restarts, max_evals, seed});
        return py::make_tuple(e.sum_rate, e.theta);
      },
      py::arg("scheme"), py::arg("network_json"), py::arg("restarts") = 8, py::arg("max_evals") = 20000,
      py::arg("seed") = 1);
  m.def(
      "rsum_star",
      [](const std::string& network, std::size_t restarts, std::uint64_t seed) {
        return rsum_star(network_from_json(network), {restarts, 20000, seed});
      },
      py::arg("network_json"), py::arg("restarts") = 16, py::arg("seed") = 1);
  m.def(
      "sweep_csv", [](const std::string& config) { return sweep_csv(run_sweep(sweep_config_from_json(config))); },
      py::arg("config_json"));
  m.def(
      "gap_audit",
      [](std::size_t instances, std::uint64_t seed, std::size_t nmax, std::size_t lmax) {
        return gap_audit_json(run_gap_audit(instances, seed, nmax, lmax), seed, false);
      },
      py::arg("instances"), py::arg("seed"), py::arg("nmax") = 4, py::arg("lmax") = 4);
  m.def(
      "verify_examples",
      [](int example, std::size_t samples, std::uint64_t seed) {
        std::vector<ExampleReport> reps;
        if (example == 0 || example == 1) {
          Example1Budget b;
          b.seed = seed;
          reps.push_back(example1_run(bsc(0.1), 0.3, b));
          reps.push_back(example1_run(bsc(0.0), 0.5, b));
        }
        if (example == 0 || example == 2) {
          reps.push_back(example2_part_a());
          reps.push_back(example2_part_b({samples, seed}));
        }
        if (reps.empty()) throw std::invalid_argument("example must be 0, 1 or 2");
        return reports_to_json(reps);
      },
      py::arg("example") = 0, py::arg("samples") = 10000, py::arg("seed") = 1);
}
