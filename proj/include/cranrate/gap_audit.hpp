#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cranrate/gaussian_info.hpp"

namespace cranrate {

// BS indices S and user indices D are 0-based and strictly increasing.
struct CutReport {
  std::vector<int> S;
  std::vector<int> D;
  double inner = 0.0;
  double outer = 0.0;
  double gap = 0.0;
};

// Capacity terms crossing the cut: C_k for k outside S plus C_kj for j in S,
// k outside S.
double cut_capacity(const CranNetwork& network, const std::vector<int>& S);

// Relaxed decode-forward value of the cut: capacity terms plus
// 1/2 log2 det(I + P G(D,S) G(D,S)^T) - |D|/2. Empty S gives the bare cut.
double ddf_inner_relaxed(const CranNetwork& network, const std::vector<int>& D, const std::vector<int>& S);

// Relaxed cut-set value: as above with + 1/2 min{|S|, |D| log2 |S|}.
double cutset_outer_relaxed(const CranNetwork& network, const std::vector<int>& D, const std::vector<int>& S);

// L/2 + min{N, L log2 N}/2.
double gap_bound(std::size_t n_bs, std::size_t n_users);

struct AuditResult {
  std::vector<CutReport> reports;  // S then D, each ordered lexicographically
  double max_gap = 0.0;
  double bound = 0.0;
  bool pass = false;
};

AuditResult audit(const CranNetwork& network);

// Random network with N in [1, nmax], L in [1, lmax], G entries uniform on
// [-2, 2], P uniform on [0.1, 100], fronthaul uniform on [0, 4] and
// cooperation links uniform on [0, 2].
CranNetwork random_network(std::mt19937_64& rng, std::size_t nmax, std::size_t lmax);

struct GapAuditSummary {
  std::vector<CranNetwork> networks;
  std::vector<AuditResult> results;
  std::size_t cuts = 0;
  double worst_slack = 0.0;  // max over instances of max_gap - bound
  bool pass = true;
};

// Audits `instances` random networks drawn from one seeded stream; instances
// run in parallel, output order follows the draw order.
GapAuditSummary run_gap_audit(std::size_t instances, std::uint64_t seed, std::size_t nmax, std::size_t lmax);

// {"instances": k, "seed": s, "pass": ..., "items": [{N, L, P, max_gap, bound, pass, cuts}]}.
std::string gap_audit_json(const GapAuditSummary& summary, std::uint64_t seed, bool with_cuts = false);

}  // namespace cranrate
