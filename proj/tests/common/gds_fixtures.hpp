#pragma once

// Random distributions shaped like the multicoding auxiliaries, shared by the
// unit and acceptance tests.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "cranrate/discrete_info.hpp"
#include "cranrate/scheme_regions.hpp"

namespace cranrate::fixtures {

// Random pmf; with `sparse` about half of the entries are zeroed.
inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n, bool sparse) {
  std::gamma_distribution<double> g(0.7, 1.0);
  std::bernoulli_distribution drop(0.5);
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) {
    x = (sparse && drop(rng)) ? 0.0 : g(rng) + 1e-12;
    total += x;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (auto& x : p) x /= total;
  return p;
}

inline JointPmf random_pmf(std::mt19937_64& rng, const std::vector<Variable>& vars, bool sparse) {
  std::size_t n = 1;
  for (const auto& v : vars) n *= v.size;
  return JointPmf(vars, random_simplex(rng, n, sparse));
}

inline Channel random_channel(std::mt19937_64& rng, const std::vector<Variable>& in, const std::vector<Variable>& out) {
  std::size_t ni = 1, no = 1;
  for (const auto& v : in) ni *= v.size;
  for (const auto& v : out) no *= v.size;
  std::vector<double> probs;
  for (std::size_t i = 0; i < ni; ++i) {
    auto row = random_simplex(rng, no, false);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return Channel(in, out, probs);
}

inline Channel random_function(std::mt19937_64& rng, const std::vector<Variable>& in, Variable out) {
  std::size_t ni = 1;
  for (const auto& v : in) ni *= v.size;
  std::uniform_int_distribution<std::size_t> pick(0, out.size - 1);
  std::vector<std::size_t> table(ni);
  for (auto& t : table) t = pick(rng);
  std::vector<std::size_t> strides(in.size(), 1);
  for (std::size_t i = in.size(); i-- > 1;) strides[i - 1] = strides[i] * in[i].size;
  return deterministic_channel(in, out, [table, strides](const std::vector<std::size_t>& d) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < d.size(); ++i) idx += d[i] * strides[i];
    return table[idx];
  });
}

// Auxiliaries, X1 = x1(aux of BS 1), X2 = x2(aux of BS 2), (Y1, Y2) through a
// random channel from (X1, X2). Degenerate auxiliaries are left out.
inline JointPmf gds_pmf(std::mt19937_64& rng, GdsRestriction r) {
  std::uniform_int_distribution<std::size_t> card(2, 3);
  std::bernoulli_distribution sparse(0.3);
  auto var = [&](const std::string& n) { return Variable{n, card(rng)}; };
  const Variable x1{"X1", 2}, x2{"X2", 2};
  std::vector<Variable> bs1, bs2;
  JointPmf aux({}, {1.0});
  switch (r) {
    case GdsRestriction::SchemeI: {
      Variable u0 = var("U0"), v0 = var("V0");
      aux = random_pmf(rng, {u0, v0}, sparse(rng));
      bs1 = bs2 = {u0, v0};
      break;
    }
    case GdsRestriction::SchemeII: {
      std::vector<Variable> vs;
      for (const char* n : {"U0", "V0", "U1", "V1", "U2", "V2"}) vs.push_back({n, 2});
      aux = random_pmf(rng, {vs[0]}, false);
      for (std::size_t i = 1; i < vs.size(); ++i) aux = product(aux, random_pmf(rng, {vs[i]}, false));
      bs1 = {vs[0], vs[1], vs[2], vs[3]};
      bs2 = {vs[0], vs[1], vs[4], vs[5]};
      break;
    }
    case GdsRestriction::SchemeIII: {
      Variable u1{"U1", 2}, u2{"U2", 2}, v1{"V1", 2}, v2{"V2", 2};
      aux = random_pmf(rng, {u1, u2, v1, v2}, sparse(rng));
      bs1 = {u1, v1};
      bs2 = {u2, v2};
      break;
    }
    case GdsRestriction::SingleBs: {
      Variable u = var("U"), v = var("V");
      aux = random_pmf(rng, {u, v}, sparse(rng));
      JointPmf p = compose(aux, random_function(rng, {u, v}, x1));
      p = compose(p, random_channel(rng, {x1}, {{"Y1", 2}, {"Y2", 2}}));
      return p;
    }
    case GdsRestriction::SingleUser: {
      Variable u = var("U");
      JointPmf p = random_pmf(rng, {u, x1, x2}, sparse(rng));
      return compose(p, random_channel(rng, {x1, x2}, {{"Y1", 2}}));
    }
  }
  JointPmf p = compose(aux, random_function(rng, bs1, x1));
  p = compose(p, random_function(rng, bs2, x2));
  return compose(p, random_channel(rng, {x1, x2}, {{"Y1", 2}, {"Y2", 2}}));
}

inline std::map<std::string, double> random_caps(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::bernoulli_distribution zero(0.15);
  std::map<std::string, double> c;
  for (const char* n : {"C1", "C2", "C12", "C21"}) c[n] = zero(rng) ? 0.0 : u(rng);
  return c;
}

// Values every atom of every listed system on the pmf.
inline AtomValuation valuation_for(const JointPmf& pmf, const std::vector<const ConstraintSystem*>& systems,
                                   const std::map<std::string, double>& caps) {
  std::vector<std::string> names;
  for (const auto* s : systems)
    for (const auto& a : information_atoms(*s)) names.push_back(a);
  AtomValuation v = atom_valuation(pmf, names, caps);
  for (const auto& [k, x] : caps) v[k] = x;
  return v;
}

}  // namespace cranrate::fixtures

namespace cranrate::fixtures {

// p(u1, u2, x1, x2) arbitrary, X0 constant, (Y1, Y2) through a random channel.
inline JointPmf compression_pmf(std::mt19937_64& rng) {
  std::bernoulli_distribution sparse(0.3);
  const Variable x1{"X1", 2}, x2{"X2", 2};
  JointPmf p = random_pmf(rng, {{"X0", 1}, {"U1", 2}, {"U2", 2}, x1, x2}, sparse(rng));
  return compose(p, random_channel(rng, {x1, x2}, {{"Y1", 2}, {"Y2", 2}}));
}

// n valuations from pmfs shaped for restriction r, with every atom of a and b
// valued. scheme3_filter keeps only valuations meeting the private-only side
// conditions.
inline std::vector<AtomValuation> restriction_valuations(GdsRestriction r, const ConstraintSystem& a, const ConstraintSystem& b,
                                      std::size_t n, std::uint64_t seed, bool scheme3_filter = false) {
  std::mt19937_64 rng(seed);
  std::vector<AtomValuation> out;
  std::size_t tries = 0;
  while (out.size() < n && tries++ < 50 * n) {
    JointPmf pmf = gds_pmf(rng, r);
    auto caps = random_caps(rng);
    std::vector<const ConstraintSystem*> systems{&a, &b};
    ConstraintSystem side;
    if (scheme3_filter) {
      side = scheme3_region();
      for (const auto& c : scheme3_side_conditions()) {
        LinearConstraint lc;
        lc.rhs = c.rhs - c.lhs;
        side.add(lc);
      }
      systems.push_back(&side);
    }
    AtomValuation v = valuation_for(pmf, systems, caps);
    if (scheme3_filter && !scheme3_feasible(v)) continue;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace cranrate::fixtures
