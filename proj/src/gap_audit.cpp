#include "cranrate/gap_audit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "cranrate/parallel.hpp"

namespace cranrate {

namespace {

void check_index_set(const std::vector<int>& v, std::size_t n, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0 || static_cast<std::size_t>(v[i]) >= n) throw std::invalid_argument(std::string(what) + " index out of range");
    if (i > 0 && v[i] <= v[i - 1]) throw std::invalid_argument(std::string(what) + " must be strictly increasing");
  }
}

double signal_term(const CranNetwork& net, const std::vector<int>& D, const std::vector<int>& S) {
  if (S.empty()) return 0.0;
  Eigen::MatrixXd g(D.size(), S.size());
  for (std::size_t a = 0; a < D.size(); ++a)
    for (std::size_t b = 0; b < S.size(); ++b) g(a, b) = net.G(D[a], S[b]);
  return capacity_logdet(g, net.P * Eigen::MatrixXd::Identity(S.size(), S.size()));
}

void check_cut(const CranNetwork& net, const std::vector<int>& D, const std::vector<int>& S) {
  net.validate();
  if (D.empty()) throw std::invalid_argument("user set D must be nonempty");
  check_index_set(D, net.L(), "D");
  check_index_set(S, net.N(), "S");
}

// Nonempty-or-empty subsets of {0..n-1} as sorted index lists, lexicographic.
std::vector<std::vector<int>> subsets(std::size_t n, bool include_empty) {
  std::vector<std::vector<int>> out;
  for (std::uint64_t m = include_empty ? 0 : 1; m < (1ULL << n); ++m) {
    std::vector<int> s;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1) s.push_back(static_cast<int>(i));
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double cut_capacity(const CranNetwork& network, const std::vector<int>& S) {
  double caps = 0.0;
  for (std::size_t k = 0; k < network.N(); ++k) {
    if (std::binary_search(S.begin(), S.end(), static_cast<int>(k))) continue;
    caps += network.C(k);
    for (int j : S) caps += network.Ccoop(k, j);
  }
  return caps;
}

double ddf_inner_relaxed(const CranNetwork& network, const std::vector<int>& D, const std::vector<int>& S) {
  check_cut(network, D, S);
  double v = cut_capacity(network, S);
  if (S.empty()) return v;
  return v + signal_term(network, D, S) - 0.5 * static_cast<double>(D.size());
}

double cutset_outer_relaxed(const CranNetwork& network, const std::vector<int>& D, const std::vector<int>& S) {
  check_cut(network, D, S);
  double v = cut_capacity(network, S);
  if (S.empty()) return v;
  double s = static_cast<double>(S.size());
  return v + signal_term(network, D, S) + 0.5 * std::min(s, static_cast<double>(D.size()) * std::log2(s));
}

double gap_bound(std::size_t n_bs, std::size_t n_users) {
  double n = static_cast<double>(n_bs), l = static_cast<double>(n_users);
  return 0.5 * l + 0.5 * std::min(n, l * std::log2(n));
}

AuditResult audit(const CranNetwork& network) {
  network.validate();
  AuditResult r;
  r.bound = gap_bound(network.N(), network.L());
  r.pass = true;
  const auto ds = subsets(network.L(), false);
  for (const auto& S : subsets(network.N(), true))
    for (const auto& D : ds) {
      CutReport c{S, D, ddf_inner_relaxed(network, D, S), cutset_outer_relaxed(network, D, S), 0.0};
      c.gap = c.outer - c.inner;
      if (c.gap < -1e-9) r.pass = false;
      r.max_gap = std::max(r.max_gap, c.gap);
      r.reports.push_back(std::move(c));
    }
  if (r.max_gap > r.bound + 1e-9) r.pass = false;
  return r;
}

CranNetwork random_network(std::mt19937_64& rng, std::size_t nmax, std::size_t lmax) {
  if (nmax < 1 || lmax < 1) throw std::invalid_argument("nmax and lmax must be >= 1");
  if (nmax > 16 || lmax > 16) throw std::invalid_argument("nmax and lmax are capped at 16");
  std::uniform_int_distribution<std::size_t> nd(1, nmax), ld(1, lmax);
  std::uniform_real_distribution<double> gd(-2.0, 2.0), pd(0.1, 100.0), cd(0.0, 4.0), td(0.0, 2.0);
  CranNetwork net;
  const std::size_t n = nd(rng), l = ld(rng);
  net.G.resize(l, n);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < n; ++j) net.G(i, j) = gd(rng);
  net.P = pd(rng);
  net.C.resize(n);
  for (std::size_t k = 0; k < n; ++k) net.C(k) = cd(rng);
  net.Ccoop = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      if (k != j) net.Ccoop(k, j) = td(rng);
  return net;
}

GapAuditSummary run_gap_audit(std::size_t instances, std::uint64_t seed, std::size_t nmax, std::size_t lmax) {
  GapAuditSummary s;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < instances; ++i) s.networks.push_back(random_network(rng, nmax, lmax));
  s.results.resize(instances);
  parallel_for(instances, [&](std::size_t i) { s.results[i] = audit(s.networks[i]); });
  s.worst_slack = instances ? -INFINITY : 0.0;
  for (const auto& r : s.results) {
    s.cuts += r.reports.size();
    s.worst_slack = std::max(s.worst_slack, r.max_gap - r.bound);
    s.pass = s.pass && r.pass;
  }
  return s;
}

std::string gap_audit_json(const GapAuditSummary& summary, std::uint64_t seed, bool with_cuts) {
  using nlohmann::json;
  auto one_based = [](const std::vector<int>& v) {
    json a = json::array();
    for (int x : v) a.push_back(x + 1);
    return a;
  };
  json items = json::array();
  for (std::size_t i = 0; i < summary.results.size(); ++i) {
    const auto& net = summary.networks[i];
    const auto& r = summary.results[i];
    json it = {{"N", net.N()}, {"L", net.L()}, {"P", net.P}, {"max_gap", r.max_gap},
               {"bound", r.bound}, {"pass", r.pass}, {"cuts", r.reports.size()}};
    if (with_cuts) {
      json cuts = json::array();
      for (const auto& c : r.reports)
        cuts.push_back({{"S", one_based(c.S)}, {"D", one_based(c.D)}, {"inner", c.inner}, {"outer", c.outer}, {"gap", c.gap}});
      it["reports"] = std::move(cuts);
    }
    items.push_back(std::move(it));
  }
  json out = {{"instances", summary.results.size()}, {"seed", seed}, {"cuts", summary.cuts},
              {"worst_slack", summary.worst_slack}, {"pass", summary.pass}, {"items", std::move(items)}};
  return out.dump(2);
}

}  // namespace cranrate
