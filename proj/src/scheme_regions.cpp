#include "cranrate/scheme_regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace cranrate {

namespace {

using Terms = std::vector<std::pair<Rational, AtomSpec>>;

AffineExpr expr(const Terms& terms, Rational constant = 0) {
  AffineExpr e(constant);
  for (const auto& [q, atom] : terms)
    if (!atom.trivially_zero()) e.add(canonical_name(atom), q);
  return e;
}

AtomSpec I(VarList a, VarList b, VarList c = {}) { return mutual_info_atom(std::move(a), std::move(b), std::move(c)); }
AtomSpec Gam(VarList omega) { return total_correlation_atom(std::move(omega)); }
AtomSpec K(const std::string& name) { return constant_atom(name); }

LinearConstraint row(std::map<std::string, Rational> lhs, AffineExpr rhs) {
  LinearConstraint c;
  for (auto& [v, q] : lhs)
    if (q != 0) c.lhs.emplace(v, q);
  c.rhs = std::move(rhs);
  return c;
}

// Subsets of {0,1,2} in lexicographic order of their sorted element lists.
const std::vector<std::vector<int>>& subsets3() {
  static const std::vector<std::vector<int>> s{{}, {0}, {0, 1}, {0, 1, 2}, {0, 2}, {1}, {1, 2}, {2}};
  return s;
}

VarList names(const std::string& prefix, const std::vector<int>& idx) {
  VarList out;
  for (int i : idx) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<int> complement3(const std::vector<int>& s) {
  std::vector<int> out;
  for (int i = 0; i < 3; ++i)
    if (std::find(s.begin(), s.end(), i) == s.end()) out.push_back(i);
  return out;
}

VarList concat(VarList a, const VarList& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

ConstraintSystem two_user_system() {
  ConstraintSystem s;
  s.variables = {"R1", "R2"};
  return s;
}

}  // namespace

const std::vector<std::string>& gds_auxiliary_rates() {
  static const std::vector<std::string> r{"Ru0", "Ru1", "Ru2", "Rv0", "Rv1", "Rv2"};
  return r;
}

ConstraintSystem gds_theorem1_system() {
  ConstraintSystem sys;
  sys.variables = {"R1", "R2", "Ru0", "Ru1", "Ru2", "Rv0", "Rv1", "Rv2"};

  for (const auto& ou : subsets3())
    for (const auto& ov : subsets3()) {
      if (ou.size() + ov.size() < 2) continue;
      std::map<std::string, Rational> lhs;
      if (ou.size() == 3) lhs["R1"] = 1;
      if (ov.size() == 3) lhs["R2"] = 1;
      AffineExpr rhs = expr({{-1, Gam(concat(names("U", ou), names("V", ov)))}});
      for (int i : ou) lhs["Ru" + std::to_string(i)] -= 1;
      for (int j : ov) lhs["Rv" + std::to_string(j)] -= 1;
      sys.add(row(lhs, rhs));
    }

  for (const char* side : {"u", "v"}) {
    const std::string aux = side[0] == 'u' ? "U" : "V";
    const std::string out = side[0] == 'u' ? "Y1" : "Y2";
    for (const auto& o : subsets3()) {
      if (o.empty()) continue;
      std::map<std::string, Rational> lhs;
      for (int i : o) lhs["R" + std::string(side) + std::to_string(i)] = 1;
      VarList rest = concat(names(aux, complement3(o)), {out});
      sys.add(row(lhs, expr({{1, I(names(aux, o), rest)}, {1, Gam(names(aux, o))}})));
    }
  }

  auto all_rates = [](std::vector<int> idx) {
    std::map<std::string, Rational> lhs;
    for (int i : idx) {
      lhs["Ru" + std::to_string(i)] = 1;
      lhs["Rv" + std::to_string(i)] = 1;
    }
    return lhs;
  };
  sys.add(row(all_rates({0, 1}),
              expr({{1, K("C1")}, {1, K("C12")}, {1, Gam({"U0", "V0", "U1", "V1"})}})));
  sys.add(row(all_rates({0, 2}),
              expr({{1, K("C2")}, {1, K("C21")}, {1, Gam({"U0", "V0", "U2", "V2"})}})));
  sys.add(row(all_rates({0, 1, 2}), expr({{1, K("C1")},
                                          {1, K("C2")},
                                          {1, Gam({"U0", "V0", "U1", "V1"})},
                                          {1, Gam({"U0", "V0", "U2", "V2"})},
                                          {-1, Gam({"U0", "V0"})}})));
  return sys;
}

GdsSubstitution gds_substitution(GdsRestriction restriction) {
  GdsSubstitution s;
  switch (restriction) {
    case GdsRestriction::SchemeI:
      s.atoms.degenerate = {"U1", "V1", "U2", "V2"};
      s.zero_rates = {"Ru1", "Ru2", "Rv1", "Rv2"};
      s.eliminate = {"Ru0", "Rv0"};
      break;
    case GdsRestriction::General:
      s.eliminate = {"Ru0", "Rv0", "Ru1", "Rv1", "Ru2", "Rv2"};
      break;
    case GdsRestriction::SchemeII:
      s.atoms.independent = {"U0", "U1", "U2", "V0", "V1", "V2"};
      s.eliminate = {"Ru0", "Rv0", "Ru1", "Rv1", "Ru2", "Rv2"};
      break;
    case GdsRestriction::SchemeIII:
      s.atoms.degenerate = {"U0", "V0"};
      s.zero_rates = {"Ru0", "Rv0"};
      s.eliminate = {"Ru1", "Rv1", "Ru2", "Rv2"};
      break;
    case GdsRestriction::SingleBs:
      s.atoms.degenerate = {"U0", "V0", "U2", "V2"};
      s.atoms.rename = {{"U1", "U"}, {"V1", "V"}};
      s.atoms.zero_constants = {"C2", "C12", "C21"};
      s.zero_rates = {"Ru0", "Ru2", "Rv0", "Rv2"};
      s.eliminate = {"Ru1", "Rv1"};
      break;
    case GdsRestriction::SingleUser:
      s.atoms.degenerate = {"V0", "V1", "V2"};
      s.atoms.rename = {{"U0", "U"}, {"U1", "X1"}, {"U2", "X2"}};
      s.zero_rates = {"R2", "Rv0", "Rv1", "Rv2"};
      s.eliminate = {"Ru0", "Ru1", "Ru2"};
      break;
  }
  return s;
}

ConstraintSystem substitute_atoms(const ConstraintSystem& system, const AtomSubstitution& sub) {
  ConstraintSystem out;
  out.variables = system.variables;
  for (const auto& c : system.constraints) {
    LinearConstraint n;
    n.lhs = c.lhs;
    n.rhs.constant = c.rhs.constant;
    for (const auto& [name, q] : c.rhs.terms) {
      auto atom = substitute(parse_atom(name), sub);
      if (atom) n.rhs.add(canonical_name(*atom), q);
    }
    out.constraints.push_back(std::move(n));
  }
  return out;
}

namespace {

// Every atom in these systems (mutual information, total correlation, link
// capacity) is nonnegative, so an rhs with nonnegative coefficients and
// constant is nonnegative for every valuation.
bool nonnegative_rhs(const AffineExpr& e) {
  if (e.constant < 0) return false;
  return std::all_of(e.terms.begin(), e.terms.end(), [](const auto& t) { return t.second > 0; });
}

// Drops constraints that hold for every valuation: lhs nonpositive on
// variables known to be nonnegative, rhs nonnegative. The nonnegativity rows
// themselves are kept.
ConstraintSystem drop_always_true(const ConstraintSystem& s, const std::vector<std::string>& nonneg) {
  ConstraintSystem out;
  out.variables = s.variables;
  for (const auto& c : s.constraints) {
    bool is_bound = c.lhs.size() == 1 && c.rhs.terms.empty() && c.rhs.constant == 0;
    bool lhs_ok = std::all_of(c.lhs.begin(), c.lhs.end(), [&](const auto& t) {
      return t.second < 0 && std::find(nonneg.begin(), nonneg.end(), t.first) != nonneg.end();
    });
    if (!is_bound && lhs_ok && nonnegative_rhs(c.rhs)) continue;
    out.constraints.push_back(c);
  }
  return out;
}

// Among constraints with the same lhs, drops one whose rhs exceeds another's
// by a nonnegative combination of atoms.
ConstraintSystem drop_dominated(const ConstraintSystem& s) {
  std::map<std::map<std::string, Rational>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < s.constraints.size(); ++i) groups[s.constraints[i].lhs].push_back(i);
  std::vector<bool> keep(s.constraints.size(), true);
  for (const auto& [lhs, idx] : groups)
    for (std::size_t b : idx)
      for (std::size_t a : idx) {
        if (a == b || !keep[a]) continue;
        if (nonnegative_rhs(s.constraints[b].rhs - s.constraints[a].rhs)) {
          keep[b] = false;
          break;
        }
      }
  ConstraintSystem out;
  out.variables = s.variables;
  for (std::size_t i = 0; i < s.constraints.size(); ++i)
    if (keep[i]) out.constraints.push_back(s.constraints[i]);
  return out;
}

}  // namespace

double theorem1_margin(const AtomValuation& valuation, double r1, double r2) {
  static const ConstraintSystem system = gds_theorem1_system();
  return max_uniform_margin(resolve(system, valuation), {{"R1", r1}, {"R2", r2}}, gds_auxiliary_rates());
}

ConstraintSystem gds_lifted(const ConstraintSystem& system, GdsRestriction restriction) {
  GdsSubstitution sub = gds_substitution(restriction);
  ConstraintSystem s = substitute_atoms(system, sub.atoms);
  s = zero_variables(s, sub.zero_rates);
  for (const auto& v : sub.eliminate) {
    LinearConstraint nonneg;
    nonneg.lhs[v] = -1;
    s.add(nonneg);
  }
  return drop_always_true(syntactic_reduce(s), sub.eliminate);
}

ConstraintSystem gds_project(const ConstraintSystem& system, GdsRestriction restriction, const FmeOptions& options) {
  GdsSubstitution sub = gds_substitution(restriction);
  ConstraintSystem s = fme_eliminate(gds_lifted(system, restriction), sub.eliminate, options);
  return drop_dominated(drop_always_true(syntactic_reduce(s), {}));
}

// ---------------------------------------------------------------------------

ConstraintSystem scheme1_region() {
  ConstraintSystem s = two_user_system();
  const AtomSpec iu = I({"U0"}, {"Y1"}), iv = I({"V0"}, {"Y2"}), iuv = I({"U0"}, {"V0"});
  s.add(row({{"R1", 1}}, expr({{1, iu}})));
  s.add(row({{"R2", 1}}, expr({{1, iv}})));
  s.add(row({{"R1", 1}, {"R2", 1}}, expr({{1, iu}, {1, iv}, {-1, iuv}})));
  s.add(row({{"R1", 1}, {"R2", 1}}, expr({{1, K("C1")}, {1, K("C12")}})));
  s.add(row({{"R1", 1}, {"R2", 1}}, expr({{1, K("C2")}, {1, K("C21")}})));
  s.add(row({{"R1", 1}, {"R2", 1}}, expr({{1, K("C1")}, {1, K("C2")}})));
  return s;
}

ConstraintSystem scheme2_region() {
  ConstraintSystem s = two_user_system();
  const AtomSpec u2 = I({"U2"}, {"Y1"}, {"U0", "U1"}), u1 = I({"U1"}, {"Y1"}, {"U0", "U2"});
  const AtomSpec v2 = I({"V2"}, {"Y2"}, {"V0", "V1"}), v1 = I({"V1"}, {"Y2"}, {"V0", "V2"});
  const AtomSpec uall = I({"U0", "U1", "U2"}, {"Y1"}), vall = I({"V0", "V1", "V2"}, {"Y2"});
  const AtomSpec u12 = I({"U1", "U2"}, {"Y1"}, {"U0"}), v12 = I({"V1", "V2"}, {"Y2"}, {"V0"});
  const Terms c1 = {{1, K("C1")}, {1, K("C12")}}, c2 = {{1, K("C2")}, {1, K("C21")}};
  const Terms call = {{1, K("C1")}, {1, K("C2")}, {1, K("C12")}, {1, K("C21")}};
  auto plus = [](Terms a, const Terms& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  s.add(row({{"R1", 1}}, expr(plus(c1, {{1, u2}}))));
  s.add(row({{"R1", 1}}, expr(plus(c2, {{1, u1}}))));
  s.add(row({{"R1", 1}}, expr({{1, uall}})));
  s.add(row({{"R2", 1}}, expr(plus(c1, {{1, v2}}))));
  s.add(row({{"R2", 1}}, expr(plus(c2, {{1, v1}}))));
  s.add(row({{"R2", 1}}, expr({{1, vall}})));
  s.add(row({{"R1", 1}, {"R2", 1}}, expr({{1, K("C1")}, {1, K("C2")}})));
  s.add(row({{"R1", 1}, {"R2", 1}}, expr(plus(c1, {{1, u2}, {1, v2}}))));
  s.add(row({{"R1", 1}, {"R2", 1}}, expr(plus(c2, {{1, u1}, {1, v1}}))));
  s.add(row({{"R1", 1}, {"R2", 2}}, expr(plus(call, {{1, v12}}))));
  s.add(row({{"R1", 2}, {"R2", 1}}, expr(plus(call, {{1, u12}}))));
  s.add(row({{"R1", 2}, {"R2", 2}}, expr(plus(call, {{1, u12}, {1, v12}}))));
  return s;
}

ConstraintSystem scheme3_region() {
  ConstraintSystem s = two_user_system();
  // a_k = I(Uk; Uk', Y1), b_k = I(Vk; Vk', Y2)
  const AtomSpec a1 = I({"U1"}, {"U2", "Y1"}), a2 = I({"U2"}, {"U1", "Y1"});
  const AtomSpec b1 = I({"V1"}, {"V2", "Y2"}), b2 = I({"V2"}, {"V1", "Y2"});
  const AtomSpec iu = I({"U1", "U2"}, {"Y1"}), iv = I({"V1", "V2"}, {"Y2"});
  const AtomSpec cross = I({"U1", "V1"}, {"U2", "V2"});
  const Terms c1 = {{1, K("C1")}, {1, K("C12")}}, c2 = {{1, K("C2")}, {1, K("C21")}};
  auto plus = [](Terms a, const Terms& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };

  s.add(row({{"R1", 1}}, expr(plus(c1, {{1, a2}, {-1, I({"U2"}, {"U1", "V1"})}}))));
  s.add(row({{"R1", 1}}, expr(plus(c2, {{1, a1}, {-1, I({"U1"}, {"U2", "V2"})}}))));
  s.add(row({{"R1", 1}}, expr({{1, iu}})));
  s.add(row({{"R1", 1}}, expr({{1, iu}, {1, b1}, {-1, I({"V1"}, {"U1", "U2"})}})));
  s.add(row({{"R1", 1}}, expr({{1, iu}, {1, b2}, {-1, I({"V2"}, {"U1", "U2"})}})));

  s.add(row({{"R2", 1}}, expr(plus(c1, {{1, b2}, {-1, I({"V2"}, {"U1", "V1"})}}))));
  s.add(row({{"R2", 1}}, expr(plus(c2, {{1, b1}, {-1, I({"V1"}, {"U2", "V2"})}}))));
  s.add(row({{"R2", 1}}, expr({{1, iv}})));
  s.add(row({{"R2", 1}}, expr({{1, iv}, {1, a2}, {-1, I({"U2"}, {"V1", "V2"})}})));
  s.add(row({{"R2", 1}}, expr({{1, iv}, {1, a1}, {-1, I({"U1"}, {"V1", "V2"})}})));

  const std::map<std::string, Rational> sum{{"R1", 1}, {"R2", 1}};
  s.add(row(sum, expr({{1, iu}, {1, iv}, {-1, I({"U1", "U2"}, {"V1", "V2"})}})));
  s.add(row(sum, expr({{1, K("C1")}, {1, K("C2")}, {-1, cross}})));

  const Terms base1 = plus(c1, {{-1, cross}});
  s.add(row(sum, expr(plus(base1, {{1, a2}, {1, b2}, {-1, I({"U2"}, {"V2"})}}))));
  s.add(row(sum, expr(plus(base1, {{2, a2},
                                   {1, iv},
                                   {-1, I({"U2"}, {"V1"})},
                                   {-1, I({"U2"}, {"V2"})},
                                   {1, I({"V1"}, {"V2"})}}))));
  s.add(row(sum, expr(plus(base1, {{1, iu},
                                   {2, b2},
                                   {-1, I({"U1"}, {"V2"})},
                                   {-1, I({"U2"}, {"V2"})},
                                   {1, I({"U1"}, {"U2"})}}))));

  const Terms base2 = plus(c2, {{-1, cross}});
  s.add(row(sum, expr(plus(base2, {{1, a1}, {1, b1}, {-1, I({"U1"}, {"V1"})}}))));
  s.add(row(sum, expr(plus(base2, {{2, a1},
                                   {1, iv},
                                   {-1, I({"U1"}, {"V1"})},
                                   {-1, I({"U1"}, {"V2"})},
                                   {1, I({"V1"}, {"V2"})}}))));
  s.add(row(sum, expr(plus(base2, {{1, iu},
                                   {2, b1},
                                   {-1, I({"U1"}, {"V1"})},
                                   {-1, I({"U2"}, {"V1"})},
                                   {1, I({"U1"}, {"U2"})}}))));
  return s;
}

std::vector<SideCondition> scheme3_side_conditions() {
  const AtomSpec a1 = I({"U1"}, {"U2", "Y1"}), a2 = I({"U2"}, {"U1", "Y1"});
  const AtomSpec b1 = I({"V1"}, {"V2", "Y2"}), b2 = I({"V2"}, {"V1", "Y2"});
  return {
      {expr({{1, I({"U1"}, {"V1"})}}), expr({{1, a1}, {1, b1}})},
      {expr({{1, I({"U2"}, {"V2"})}}), expr({{1, a2}, {1, b2}})},
      {expr({{1, I({"U1"}, {"V2"})}}), expr({{1, a1}, {1, b2}})},
      {expr({{1, I({"U2"}, {"V1"})}}), expr({{1, a2}, {1, b1}})},
  };
}

bool scheme3_feasible(const AtomValuation& valuation, double tol) {
  for (const auto& c : scheme3_side_conditions()) {
    double l = c.lhs.evaluate(valuation), r = c.rhs.evaluate(valuation);
    if (!(l <= r + tol)) return false;
  }
  return true;
}

ConstraintSystem corollary4_region() {
  ConstraintSystem s = two_user_system();
  const AtomSpec iu = I({"U"}, {"Y1"}), iv = I({"V"}, {"Y2"});
  s.add(row({{"R1", 1}}, expr({{1, iu}})));
  s.add(row({{"R2", 1}}, expr({{1, iv}})));
  s.add(row({{"R1", 1}, {"R2", 1}}, expr({{1, iu}, {1, iv}, {-1, I({"U"}, {"V"})}})));
  s.add(row({{"R1", 1}, {"R2", 1}}, expr({{1, K("C1")}})));
  return s;
}

namespace {

std::vector<std::pair<Rational, AffineExpr>> corollary5_terms() {
  const AtomSpec x12u = I({"X1"}, {"X2"}, {"U"});
  return {
      {1, expr({{1, K("C1")}, {1, K("C2")}, {-1, x12u}})},
      {1, expr({{1, K("C1")}, {1, K("C12")}, {1, I({"X2"}, {"Y1"}, {"U", "X1"})}})},
      {1, expr({{1, K("C2")}, {1, K("C21")}, {1, I({"X1"}, {"Y1"}, {"U", "X2"})}})},
      {1, expr({{1, I({"X1", "X2"}, {"Y1"})}})},
      {2, expr({{1, K("C1")},
                {1, K("C2")},
                {1, K("C12")},
                {1, K("C21")},
                {1, I({"X1", "X2"}, {"Y1"}, {"U"})},
                {-1, x12u}})},
  };
}

}  // namespace

ConstraintSystem corollary5_region() {
  ConstraintSystem s;
  s.variables = {"R1"};
  for (auto& [q, rhs] : corollary5_terms()) s.add(row({{"R1", q}}, rhs));
  return s;
}

double corollary5_rate(const AtomValuation& valuation) {
  double best = std::numeric_limits<double>::infinity();
  for (auto& [q, rhs] : corollary5_terms()) best = std::min(best, rhs.evaluate(valuation) / q.get_d());
  return std::max(0.0, best);
}

ConstraintSystem gcomp_theorem2_region() {
  ConstraintSystem s = two_user_system();
  const AtomSpec i1 = I({"U1"}, {"Y1"}), i2 = I({"U2"}, {"Y2"}), i12 = I({"U1"}, {"U2"});
  const Terms c1 = {{1, K("C1")}, {1, K("C12")}}, c2 = {{1, K("C2")}, {1, K("C21")}};
  const Terms call = {{1, K("C1")}, {1, K("C2")}, {1, K("C12")}, {1, K("C21")}};
  auto plus = [](Terms a, const Terms& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const AtomSpec all = I({"U1", "U2"}, {"X0", "X1", "X2"}), x12 = I({"X1"}, {"X2"}, {"X0"});

  for (int u = 1; u <= 2; ++u) {
    const std::string r = "R" + std::to_string(u), U = "U" + std::to_string(u);
    const AtomSpec iy = u == 1 ? i1 : i2;
    s.add(row({{r, 1}}, expr({{1, iy}})));
    s.add(row({{r, 1}}, expr(plus(c1, {{1, iy}, {-1, I({U}, {"X0", "X1"})}}))));
    s.add(row({{r, 1}}, expr(plus(c2, {{1, iy}, {-1, I({U}, {"X0", "X2"})}}))));
  }
  const Terms marton = {{1, i1}, {1, i2}, {-1, i12}};
  const std::map<std::string, Rational> sum{{"R1", 1}, {"R2", 1}};
  s.add(row(sum, expr(marton)));
  s.add(row(sum, expr(plus(plus(marton, c1), {{-1, I({"U1", "U2"}, {"X0", "X1"})}}))));
  s.add(row(sum, expr(plus(plus(marton, c2), {{-1, I({"U1", "U2"}, {"X0", "X2"})}}))));
  s.add(row(sum, expr(plus(marton, {{1, K("C1")}, {1, K("C2")}, {-1, all}, {-1, x12}}))));
  const Terms full = plus(plus(marton, call), {{-1, all}, {-1, x12}});
  s.add(row({{"R1", 2}, {"R2", 1}}, expr(plus(full, {{1, i1}, {-1, I({"U1"}, {"X0"})}}))));
  s.add(row({{"R1", 1}, {"R2", 2}}, expr(plus(full, {{1, i2}, {-1, I({"U2"}, {"X0"})}}))));
  s.add(row({{"R1", 2}, {"R2", 2}}, expr(plus(plus(full, marton), {{-1, I({"U1", "U2"}, {"X0"})}}))));
  return s;
}

ConstraintSystem ddf_p1_region(std::size_t n_bs, std::size_t n_users) {
  if (n_bs < 1 || n_users < 1) throw std::invalid_argument("need at least one BS and one user");
  if (n_bs > 9 || n_users > 9) throw std::invalid_argument("at most 9 BSs and 9 users");
  ConstraintSystem s;
  for (std::size_t l = 1; l <= n_users; ++l) s.variables.push_back("R" + std::to_string(l));
  for (std::uint64_t smask = 0; smask < (1ULL << n_bs); ++smask)
    for (std::uint64_t dmask = 1; dmask < (1ULL << n_users); ++dmask) {
      std::map<std::string, Rational> lhs;
      Terms rhs;
      VarList gamma;
      for (std::size_t k = 1; k <= n_bs; ++k)
        if (!(smask >> (k - 1) & 1)) {
          rhs.push_back({1, K("C" + std::to_string(k))});
          gamma.push_back("X" + std::to_string(k));
          for (std::size_t j = 1; j <= n_bs; ++j)
            if (smask >> (j - 1) & 1) rhs.push_back({1, K("C" + std::to_string(k) + std::to_string(j))});
        }
      for (std::size_t l = 1; l <= n_users; ++l)
        if (dmask >> (l - 1) & 1) {
          lhs["R" + std::to_string(l)] = 1;
          rhs.push_back({1, I({"U" + std::to_string(l)}, {"Y" + std::to_string(l)})});
          gamma.push_back("U" + std::to_string(l));
        }
      rhs.push_back({-1, Gam(gamma)});
      s.add(row(lhs, expr(rhs)));
    }
  return s;
}

ConstraintSystem cutset_region(const CranNetwork& network, const Eigen::MatrixXd& k) {
  network.validate();
  const std::size_t n = network.N(), l = network.L();
  if (static_cast<std::size_t>(k.rows()) != n || static_cast<std::size_t>(k.cols()) != n)
    throw std::invalid_argument("input covariance must be N x N");
  for (std::size_t i = 0; i < n; ++i)
    if (k(i, i) > network.P * (1 + 1e-9) + 1e-12) throw std::invalid_argument("input covariance violates the power limit");
  std::vector<Component> comps;
  for (std::size_t i = 0; i < n; ++i) comps.push_back({"X" + std::to_string(i + 1), 1});
  JointCovariance cov(comps, k);

  ConstraintSystem s;
  for (std::size_t u = 1; u <= l; ++u) s.variables.push_back("R" + std::to_string(u));
  for (std::uint64_t smask = 0; smask < (1ULL << n); ++smask) {
    std::vector<int> in, out;
    for (std::size_t i = 0; i < n; ++i) ((smask >> i & 1) ? in : out).push_back(static_cast<int>(i));
    double caps = 0.0;
    for (int kk : out) {
      caps += network.C(kk);
      for (int j : in) caps += network.Ccoop(kk, j);
    }
    Eigen::MatrixXd kcond = in.empty() ? Eigen::MatrixXd(0, 0) : conditional_block(cov, in, out);
    for (std::uint64_t dmask = 1; dmask < (1ULL << l); ++dmask) {
      std::vector<int> d;
      LinearConstraint c;
      for (std::size_t u = 0; u < l; ++u)
        if (dmask >> u & 1) {
          d.push_back(static_cast<int>(u));
          c.lhs["R" + std::to_string(u + 1)] = 1;
        }
      Eigen::MatrixXd g(d.size(), in.size());
      for (std::size_t a = 0; a < d.size(); ++a)
        for (std::size_t b = 0; b < in.size(); ++b) g(a, b) = network.G(d[a], in[b]);
      double value = caps + (in.empty() ? 0.0 : capacity_logdet(g, kcond));
      c.rhs.constant = Rational(value);
      s.add(std::move(c));
    }
  }
  return s;
}

double cutset_symmetric_sumrate(double c, double rsum_star) { return std::min(2.0 * c, rsum_star); }

// ---------------------------------------------------------------------------

namespace {

// Is some point of the segment {R1 + R2 = t, R1, R2 >= 0} inside the region?
bool segment_feasible(const NumericSystem& r, double t) {
  double lo = 0.0, hi = t;
  for (std::size_t i = 0; i < r.rhs.size(); ++i) {
    double a1 = r.lhs[i][0], a2 = r.lhs[i][1], b = r.rhs[i];
    if (std::isnan(b)) return false;
    // a1 x + a2 (t - x) <= b
    double slope = a1 - a2, room = b - a2 * t;
    if (slope > 0)
      hi = std::min(hi, room / slope);
    else if (slope < 0)
      lo = std::max(lo, room / slope);
    else if (room < 0)
      return false;
    if (lo > hi) return false;
  }
  return true;
}

}  // namespace

double max_sum_rate(const NumericSystem& region) {
  if (region.variables.size() == 1) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < region.rhs.size(); ++i) {
      double a = region.lhs[i][0], b = region.rhs[i];
      if (std::isnan(b)) return 0.0;
      if (a > 0) best = std::min(best, b / a);
      else if (b < 0) return 0.0;
    }
    return std::max(0.0, best);
  }
  if (region.variables.size() != 2) throw std::invalid_argument("max_sum_rate needs a region over two rates");
  if (!segment_feasible(region, 0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (segment_feasible(region, hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (segment_feasible(region, mid) ? lo : hi) = mid;
  }
  return lo;
}

std::string region_to_json(const ConstraintSystem& system, const AtomValuation& valuation) {
  nlohmann::json j;
  j["variables"] = system.variables;
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : system.constraints) {
    nlohmann::json lhs = nlohmann::json::object();
    for (const auto& [v, q] : c.lhs) lhs[v] = q.get_d();
    double rhs = c.rhs.evaluate(valuation);
    nlohmann::json entry{{"lhs", lhs}, {"expr", format_constraint(c)}};
    if (std::isfinite(rhs))
      entry["rhs"] = rhs;
    else
      entry["rhs"] = std::isnan(rhs) ? "nan" : (rhs > 0 ? "inf" : "-inf");
    j["constraints"].push_back(entry);
  }
  return j.dump(2);
}

bool is_capacity_constant(const std::string& atom) {
  if (atom.size() < 2 || atom[0] != 'C') return false;
  return std::all_of(atom.begin() + 1, atom.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<std::string> information_atoms(const ConstraintSystem& system) {
  std::vector<std::string> out;
  for (const auto& a : system.atoms())
    if (!is_capacity_constant(a)) out.push_back(a);
  return out;
}

}  // namespace cranrate
