#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cranrate/discrete_info.hpp"

namespace cranrate {

struct ExampleReport {
  std::string id;
  std::string verdict;  // "confirmed", "sampled-consistent" or "failed"
  std::map<std::string, double> values;
  std::map<std::string, std::string> notes;
};

// ---------------------------------------------------------------------------
// One BS, one user: noiseless fronthaul C1 into a channel p(y|x).

struct Example1Budget {
  std::size_t samples = 4000;   // random p(u, x) draws
  std::size_t refine = 8;       // best draws polished by pattern search
  std::size_t cardinality = 4;  // |U1| cap
  std::uint64_t seed = 1;
};

// min{I(U;Y), C1 - I(U;X|Y)} for the joint p(u, x) (row-major, u slowest)
// followed by the channel.
double gcomp_single_user_rate(const Channel& channel, const std::vector<double>& p_ux, std::size_t u_card, double c1);

// Capacity min{C1, max I(X;Y)} against the best G-Compression rate found.
// Throws std::invalid_argument unless the channel has exactly one input and
// one output variable and C1 >= 0.
ExampleReport example1_run(const Channel& channel, double c1, const Example1Budget& budget = {});

// Every input maps to one output with probability 1.
bool is_deterministic(const Channel& channel);

// ---------------------------------------------------------------------------
// Two BSs over Y1 = X1, Y2 = X1 xor X2 with C1 = C2 = 1, no cooperation.

// U1, U2 iid uniform bits, X0 constant, X1 = U1, X2 = U1 xor U2, plus outputs.
JointPmf example2_compression_pmf();

// Random binary auxiliaries U0..V2 with X1 = f(U0, V0, U1, V1),
// X2 = g(U0, V0, U2, V2) drawn uniformly, plus outputs. `family` picks the
// auxiliary law: 0 dense Dirichlet, 1 sparse support, 2 U-side independent
// of V-side.
JointPmf example2_gds_pmf(std::mt19937_64& rng, int family);

std::map<std::string, double> example2_capacities();

ExampleReport example2_part_a();

struct Example2Budget {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
};
// Largest margin by which any sampled multicoding region contains (1, 1);
// passes when it stays <= 1e-6.
ExampleReport example2_part_b(const Example2Budget& budget = {});

std::string reports_to_json(const std::vector<ExampleReport>& reports);
bool all_passed(const std::vector<ExampleReport>& reports);

}  // namespace cranrate
