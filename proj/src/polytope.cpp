#include "cranrate/polytope.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace cranrate {

// ---------------------------------------------------------------------------
// AffineExpr

AffineExpr& AffineExpr::add(const std::string& atom, const Rational& coeff) {
  if (coeff == 0) return *this;
  auto [it, inserted] = terms.emplace(atom, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms.erase(it);
  }
  return *this;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  for (const auto& [name, c] : other.terms) add(name, c);
  constant += other.constant;
  return *this;
}

AffineExpr& AffineExpr::operator*=(const Rational& k) {
  if (k == 0) {
    terms.clear();
    constant = 0;
    return *this;
  }
  for (auto& [name, c] : terms) c *= k;
  constant *= k;
  return *this;
}

double AffineExpr::evaluate(const AtomValuation& valuation) const {
  double sum = constant.get_d();
  for (const auto& [name, c] : terms) {
    auto it = valuation.find(name);
    if (it == valuation.end()) throw std::out_of_range("valuation has no entry for atom " + name);
    sum += c.get_d() * it->second;
  }
  return sum;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) {
  AffineExpr nb = b;
  nb *= Rational(-1);
  return a += nb;
}
AffineExpr operator*(const Rational& k, AffineExpr a) { return a *= k; }

// ---------------------------------------------------------------------------
// ConstraintSystem

void ConstraintSystem::validate() const {
  std::set<std::string> declared(variables.begin(), variables.end());
  if (declared.size() != variables.size())
    throw std::invalid_argument("duplicate variable in constraint system");
  for (const auto& c : constraints)
    for (const auto& [v, coeff] : c.lhs) {
      if (!declared.count(v)) throw std::invalid_argument("undeclared variable " + v);
      if (coeff == 0) throw std::invalid_argument("zero lhs coefficient stored for " + v);
    }
}

void ConstraintSystem::add(LinearConstraint c) {
  for (auto it = c.lhs.begin(); it != c.lhs.end();) {
    if (it->second == 0)
      it = c.lhs.erase(it);
    else
      ++it;
  }
  constraints.push_back(std::move(c));
}

std::vector<std::string> ConstraintSystem::atoms() const {
  std::set<std::string> names;
  for (const auto& c : constraints)
    for (const auto& [a, coeff] : c.rhs.terms) names.insert(a);
  return {names.begin(), names.end()};
}

bool ConstraintSystem::has_variable(const std::string& v) const {
  return std::find(variables.begin(), variables.end(), v) != variables.end();
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin core
//
// Rows are dense: [lhs over variables | rhs over atoms | rhs constant]. Each
// row carries the supports ("histories") of the multiplier vectors over the
// input constraints that produce it. Every history is the support of a real
// nonnegative combination, so a history that strictly contains another one,
// or that has more than k+1 elements after k eliminations, cannot be extreme.
// A row is dropped only when all of its histories are non-extreme.

namespace {

using Bits = std::vector<std::uint64_t>;

struct Row {
  std::vector<Rational> coeff;
  std::vector<Bits> histories;
};

std::size_t popcount(const Bits& b) {
  std::size_t n = 0;
  for (auto w : b) n += static_cast<std::size_t>(__builtin_popcountll(w));
  return n;
}

Bits unite(const Bits& a, const Bits& b) {
  Bits r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] | b[i];
  return r;
}

// a is a subset of b
bool subset(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if ((a[i] & ~b[i]) != 0) return false;
  return true;
}

void minimize_antichain(std::vector<Bits>& hs) {
  std::sort(hs.begin(), hs.end(), [](const Bits& a, const Bits& b) {
    auto pa = popcount(a), pb = popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  std::vector<Bits> kept;
  for (auto& h : hs) {
    bool dominated = false;
    for (const auto& k : kept)
      if (subset(k, h)) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back(std::move(h));
  }
  hs = std::move(kept);
}

struct Layout {
  std::vector<std::string> vars;
  std::vector<std::string> atoms;
  std::size_t nv() const { return vars.size(); }
  std::size_t na() const { return atoms.size(); }
  std::size_t width() const { return vars.size() + atoms.size() + 1; }
};

std::vector<Row> to_rows(const ConstraintSystem& sys, const Layout& layout, std::size_t words) {
  std::map<std::string, std::size_t> vi, ai;
  for (std::size_t i = 0; i < layout.nv(); ++i) vi[layout.vars[i]] = i;
  for (std::size_t i = 0; i < layout.na(); ++i) ai[layout.atoms[i]] = layout.nv() + i;
  std::vector<Row> rows;
  rows.reserve(sys.constraints.size());
  for (std::size_t r = 0; r < sys.constraints.size(); ++r) {
    const auto& c = sys.constraints[r];
    Row row;
    row.coeff.assign(layout.width(), Rational(0));
    for (const auto& [v, q] : c.lhs) row.coeff[vi.at(v)] = q;
    for (const auto& [a, q] : c.rhs.terms) row.coeff[ai.at(a)] = q;
    row.coeff.back() = c.rhs.constant;
    Bits h(words, 0);
    h[r / 64] |= std::uint64_t{1} << (r % 64);
    row.histories.push_back(std::move(h));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Positive scale that makes the first nonzero non-constant entry +-1; zero
// for rows of the form 0 <= constant.
Rational normalizer(const Row& row) {
  for (std::size_t i = 0; i + 1 < row.coeff.size(); ++i)
    if (row.coeff[i] != 0) return abs(row.coeff[i]);
  return Rational(0);
}

// Merges duplicates and constant-dominated rows (keeping the tightest
// representative and the union of histories) and drops rows 0 <= c, c >= 0.
std::vector<Row> merge_rows(std::vector<Row> rows) {
  std::map<std::vector<Rational>, std::size_t> index;
  std::vector<Row> out;
  std::vector<Rational> out_const;  // normalized constant of each output row
  bool have_infeasible = false;
  for (auto& row : rows) {
    Rational s = normalizer(row);
    if (s == 0) {
      if (row.coeff.back() >= 0) continue;
      if (have_infeasible) continue;
      have_infeasible = true;
      out.push_back(std::move(row));
      out_const.push_back(Rational(-1));
      continue;
    }
    std::vector<Rational> key(row.coeff.begin(), row.coeff.end() - 1);
    for (auto& k : key) k /= s;
    Rational c = row.coeff.back() / s;
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(std::move(key), out.size());
      out.push_back(std::move(row));
      out_const.push_back(std::move(c));
      continue;
    }
    Row& kept = out[it->second];
    for (auto& h : row.histories) kept.histories.push_back(std::move(h));
    if (c < out_const[it->second]) {
      kept.coeff = std::move(row.coeff);
      out_const[it->second] = c;
    }
    minimize_antichain(kept.histories);
  }
  return out;
}

void prune_non_extreme(std::vector<Row>& rows, std::size_t max_support) {
  struct Ref {
    std::size_t row;
    const Bits* bits;
    std::size_t count;
  };
  std::vector<Ref> all;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& h : rows[r].histories) all.push_back({r, &h, popcount(h)});
  std::sort(all.begin(), all.end(), [](const Ref& a, const Ref& b) { return a.count < b.count; });

  std::vector<std::vector<Bits>> survivors(rows.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Ref& h = all[i];
    if (h.count > max_support) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < all.size() && all[j].count < h.count; ++j) {
      if (subset(*all[j].bits, *h.bits)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) survivors[h.row].push_back(*h.bits);
  }
  std::vector<Row> kept;
  kept.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (survivors[r].empty()) continue;
    rows[r].histories = std::move(survivors[r]);
    kept.push_back(std::move(rows[r]));
  }
  rows = std::move(kept);
}

std::vector<Row> eliminate_column(std::vector<Row>& rows, std::size_t col, std::size_t max_support,
                                  const FmeOptions& options) {
  std::vector<const Row*> pos, neg;
  std::vector<Row> next;
  for (auto& row : rows) {
    int sgn = ::sgn(row.coeff[col]);
    if (sgn > 0)
      pos.push_back(&row);
    else if (sgn < 0)
      neg.push_back(&row);
    else
      next.push_back(row);
  }
  for (const Row* p : pos) {
    for (const Row* n : neg) {
      std::vector<Bits> hs;
      for (const auto& hp : p->histories)
        for (const auto& hn : n->histories) {
          Bits u = unite(hp, hn);
          if (popcount(u) <= max_support) hs.push_back(std::move(u));
        }
      if (hs.empty()) continue;
      minimize_antichain(hs);
      Rational a = p->coeff[col];
      Rational b = -n->coeff[col];
      Row combined;
      combined.coeff.resize(p->coeff.size());
      for (std::size_t i = 0; i < p->coeff.size(); ++i)
        combined.coeff[i] = b * p->coeff[i] + a * n->coeff[i];
      combined.coeff[col] = 0;
      combined.histories = std::move(hs);
      next.push_back(std::move(combined));
      if (next.size() > options.max_constraints)
        throw FmeLimitError("Fourier-Motzkin elimination exceeded " +
                            std::to_string(options.max_constraints) + " constraints");
    }
  }
  return next;
}

}  // namespace

ConstraintSystem fme_eliminate(const ConstraintSystem& system, const std::vector<std::string>& vars,
                               const FmeOptions& options) {
  system.validate();
  for (const auto& v : vars)
    if (!system.has_variable(v)) throw std::invalid_argument("unknown variable " + v);
  {
    std::set<std::string> uniq(vars.begin(), vars.end());
    if (uniq.size() != vars.size()) throw std::invalid_argument("variable listed twice for elimination");
  }

  Layout layout{system.variables, system.atoms()};
  std::size_t words = (system.constraints.size() + 63) / 64;
  if (words == 0) words = 1;
  auto rows = merge_rows(to_rows(system, layout, words));

  std::size_t eliminated = 0;
  for (const auto& v : vars) {
    std::size_t col = static_cast<std::size_t>(
        std::find(layout.vars.begin(), layout.vars.end(), v) - layout.vars.begin());
    ++eliminated;
    rows = eliminate_column(rows, col, eliminated + 1, options);
    rows = merge_rows(std::move(rows));
    prune_non_extreme(rows, eliminated + 1);
  }

  ConstraintSystem out;
  std::set<std::string> gone(vars.begin(), vars.end());
  for (const auto& v : system.variables)
    if (!gone.count(v)) out.variables.push_back(v);
  for (const auto& row : rows) {
    LinearConstraint c;
    for (std::size_t i = 0; i < layout.nv(); ++i)
      if (row.coeff[i] != 0) c.lhs.emplace(layout.vars[i], row.coeff[i]);
    for (std::size_t i = 0; i < layout.na(); ++i)
      if (row.coeff[layout.nv() + i] != 0) c.rhs.terms.emplace(layout.atoms[i], row.coeff[layout.nv() + i]);
    c.rhs.constant = row.coeff.back();
    out.constraints.push_back(std::move(c));
  }
  return out;
}

ConstraintSystem fme_eliminate(const ConstraintSystem& system, const std::string& var,
                               const FmeOptions& options) {
  return fme_eliminate(system, std::vector<std::string>{var}, options);
}

ConstraintSystem syntactic_reduce(const ConstraintSystem& system) {
  system.validate();
  Layout layout{system.variables, system.atoms()};
  std::size_t words = std::max<std::size_t>(1, (system.constraints.size() + 63) / 64);
  auto rows = merge_rows(to_rows(system, layout, words));
  ConstraintSystem out;
  out.variables = system.variables;
  for (const auto& row : rows) {
    LinearConstraint c;
    for (std::size_t i = 0; i < layout.nv(); ++i)
      if (row.coeff[i] != 0) c.lhs.emplace(layout.vars[i], row.coeff[i]);
    for (std::size_t i = 0; i < layout.na(); ++i)
      if (row.coeff[layout.nv() + i] != 0) c.rhs.terms.emplace(layout.atoms[i], row.coeff[layout.nv() + i]);
    c.rhs.constant = row.coeff.back();
    out.constraints.push_back(std::move(c));
  }
  return out;
}

ConstraintSystem zero_variables(const ConstraintSystem& system, const std::vector<std::string>& vars) {
  std::set<std::string> zero(vars.begin(), vars.end());
  for (const auto& v : zero)
    if (!system.has_variable(v)) throw std::invalid_argument("unknown variable " + v);
  ConstraintSystem out;
  for (const auto& v : system.variables)
    if (!zero.count(v)) out.variables.push_back(v);
  for (auto c : system.constraints) {
    for (const auto& v : zero) c.lhs.erase(v);
    out.constraints.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Numeric evaluation

double NumericSystem::min_slack(const std::vector<double>& point) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rhs.size(); ++r) {
    double lhs_value = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) lhs_value += lhs[r][i] * point[i];
    double slack = rhs[r] - lhs_value;
    if (std::isnan(slack)) slack = -std::numeric_limits<double>::infinity();
    best = std::min(best, slack);
  }
  return best;
}

NumericSystem resolve(const ConstraintSystem& system, const AtomValuation& valuation) {
  NumericSystem out;
  out.variables = system.variables;
  for (const auto& c : system.constraints) {
    std::vector<double> row(system.variables.size(), 0.0);
    for (std::size_t i = 0; i < system.variables.size(); ++i) {
      auto it = c.lhs.find(system.variables[i]);
      if (it != c.lhs.end()) row[i] = it->second.get_d();
    }
    out.lhs.push_back(std::move(row));
    out.rhs.push_back(c.rhs.evaluate(valuation));
  }
  return out;
}

namespace {

// Dense tableau over rows 0..m-1 with the objective (negated costs) in row m
// and the rhs in the last column.
struct Tableau {
  std::vector<std::vector<double>> t;
  std::vector<std::size_t> basis;
  std::size_t m = 0, n = 0;

  void pivot(std::size_t row, std::size_t col) {
    const double piv = t[row][col];
    for (double& x : t[row]) x /= piv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == row || t[r][col] == 0.0) continue;
      const double f = t[r][col];
      for (std::size_t j = 0; j <= n; ++j) t[r][j] -= f * t[row][j];
    }
    basis[row] = col;
  }

  // Bland's rule. Returns false when the objective is unbounded.
  bool optimize(const std::vector<bool>& allowed, std::size_t max_iterations) {
    constexpr double eps = 1e-12;
    for (std::size_t iter = 0;; ++iter) {
      if (iter > max_iterations) throw std::runtime_error("simplex iteration limit exceeded");
      std::size_t enter = n;
      for (std::size_t j = 0; j < n; ++j)
        if (allowed[j] && t[m][j] < -eps) {
          enter = j;
          break;
        }
      if (enter == n) return true;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m; ++r)
        if (t[r][enter] > eps) {
          double ratio = t[r][n] / t[r][enter];
          if (ratio < best - eps || (ratio <= best + eps && leave < m && basis[r] < basis[leave])) best = ratio, leave = r;
        }
      if (leave == m) return false;
      pivot(leave, enter);
    }
  }

  // Objective row for maximizing c.x given the current basis.
  void set_objective(const std::vector<double>& c) {
    std::fill(t[m].begin(), t[m].end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];
    for (std::size_t r = 0; r < m; ++r) {
      const double cb = c[basis[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n; ++j) t[m][j] += cb * t[r][j];
    }
  }
};

}  // namespace

double max_uniform_margin(const NumericSystem& system, const std::map<std::string, double>& fixed,
                          const std::vector<std::string>& nonneg, std::size_t max_iterations) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (const auto& [name, v] : fixed)
    if (std::find(system.variables.begin(), system.variables.end(), name) == system.variables.end())
      throw std::invalid_argument("max_uniform_margin: unknown variable " + name);
  for (const auto& name : nonneg)
    if (std::find(system.variables.begin(), system.variables.end(), name) == system.variables.end())
      throw std::invalid_argument("max_uniform_margin: unknown variable " + name);
  const std::size_t m = system.rhs.size();

  std::vector<std::pair<std::size_t, double>> cols;  // (variable index, sign)
  for (std::size_t i = 0; i < system.variables.size(); ++i) {
    const auto& name = system.variables[i];
    if (fixed.count(name)) continue;
    cols.push_back({i, 1.0});
    if (std::find(nonneg.begin(), nonneg.end(), name) == nonneg.end()) cols.push_back({i, -1.0});
  }
  std::vector<double> b(m);
  std::vector<bool> margin(m, false);
  for (std::size_t r = 0; r < m; ++r) {
    b[r] = system.rhs[r];
    for (std::size_t i = 0; i < system.variables.size(); ++i) {
      auto it = fixed.find(system.variables[i]);
      if (it == fixed.end()) continue;
      b[r] -= system.lhs[r][i] * it->second;
      margin[r] = margin[r] || system.lhs[r][i] != 0.0;
    }
    if (!std::isfinite(b[r])) throw std::invalid_argument("max_uniform_margin: non-finite rhs");
  }
  // t = t0 + tau with t0 the smallest margin-row rhs, so margin rows start
  // feasible at the origin; rows on free variables alone may still need the
  // artificial column.
  double t0 = inf;
  for (std::size_t r = 0; r < m; ++r)
    if (margin[r]) t0 = std::min(t0, b[r]);
  if (t0 == inf) t0 = 0.0;

  // columns: structural | tau+ tau- | slacks | artificial
  const std::size_t nx = cols.size(), tp = nx, tm = nx + 1, art = nx + 2 + m, n = art + 1;
  Tableau tab;
  tab.m = m;
  tab.n = n;
  tab.t.assign(m + 1, std::vector<double>(n + 1, 0.0));
  tab.basis.resize(m);
  double worst = 0.0;
  std::size_t worst_row = m;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < nx; ++j) tab.t[r][j] = cols[j].second * system.lhs[r][cols[j].first];
    if (margin[r]) tab.t[r][tp] = 1.0, tab.t[r][tm] = -1.0;
    tab.t[r][nx + 2 + r] = 1.0;
    tab.t[r][art] = -1.0;
    tab.t[r][n] = b[r] - (margin[r] ? t0 : 0.0);
    tab.basis[r] = nx + 2 + r;
    if (tab.t[r][n] < worst) worst = tab.t[r][n], worst_row = r;
  }
  std::vector<bool> allowed(n, true);
  if (worst_row < m) {
    tab.pivot(worst_row, art);
    std::vector<double> c(n, 0.0);
    c[art] = -1.0;
    tab.set_objective(c);
    tab.optimize(allowed, max_iterations);
    if (-tab.t[m][n] > 1e-9) return -inf;
    for (std::size_t r = 0; r < m; ++r)
      if (tab.basis[r] == art)
        for (std::size_t j = 0; j < art; ++j)
          if (std::abs(tab.t[r][j]) > 1e-9) {
            tab.pivot(r, j);
            break;
          }
  }
  allowed[art] = false;
  for (std::size_t r = 0; r <= m; ++r) tab.t[r][art] = 0.0;
  std::vector<double> c(n, 0.0);
  c[tp] = 1.0;
  c[tm] = -1.0;
  tab.set_objective(c);
  if (!tab.optimize(allowed, max_iterations)) return inf;
  return t0 + tab.t[m][n];
}

bool is_member(const ConstraintSystem& system, const AtomValuation& valuation, const RatePoint& point,
               double tol) {
  std::vector<double> x;
  for (const auto& v : system.variables) {
    auto it = point.find(v);
    if (it == point.end()) throw std::invalid_argument("point has no value for variable " + v);
    x.push_back(it->second);
  }
  return resolve(system, valuation).contains(x, tol);
}

namespace {

std::vector<double> reorder(const NumericSystem& from_b, const std::vector<std::string>& order,
                            const std::vector<double>& x) {
  // Maps a point expressed in `order` into from_b's variable order.
  std::vector<double> y(from_b.variables.size(), 0.0);
  for (std::size_t i = 0; i < from_b.variables.size(); ++i) {
    auto pos = std::find(order.begin(), order.end(), from_b.variables[i]) - order.begin();
    y[i] = x[static_cast<std::size_t>(pos)];
  }
  return y;
}

// Largest t with t*dir inside the region, or NaN when the origin is outside
// or the ray is unbounded.
double ray_exit(const NumericSystem& s, const std::vector<double>& dir) {
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < s.rhs.size(); ++r) {
    double rate = 0.0;
    for (std::size_t i = 0; i < dir.size(); ++i) rate += s.lhs[r][i] * dir[i];
    if (!(s.rhs[r] >= 0.0)) return std::nan("");
    if (rate > 0.0) t = std::min(t, s.rhs[r] / rate);
  }
  return std::isfinite(t) ? t : std::nan("");
}

}  // namespace

RegionComparison regions_equal_sampled(const ConstraintSystem& a, const ConstraintSystem& b,
                                       const std::vector<AtomValuation>& valuations,
                                       std::size_t n_points, std::uint64_t seed, double tol) {
  if (valuations.empty()) throw std::invalid_argument("regions_equal_sampled: empty valuation list");
  {
    std::set<std::string> va(a.variables.begin(), a.variables.end());
    std::set<std::string> vb(b.variables.begin(), b.variables.end());
    if (va != vb) throw std::invalid_argument("regions_equal_sampled: variable sets differ");
  }
  RegionComparison report;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t dim = a.variables.size();

  for (std::size_t vi = 0; vi < valuations.size(); ++vi) {
    NumericSystem na = resolve(a, valuations[vi]);
    NumericSystem nb = resolve(b, valuations[vi]);
    double box = 0.0;
    for (const auto* s : {&na, &nb})
      for (double r : s->rhs)
        if (std::isfinite(r)) box = std::max(box, std::abs(r));
    box = box > 0.0 ? 1.25 * box : 1.0;

    for (std::size_t k = 0; k < n_points; ++k) {
      std::vector<double> x(dim);
      bool placed = false;
      if (k % 2 == 1 && dim > 0) {
        std::vector<double> dir(dim);
        double norm = 0.0;
        for (auto& d : dir) {
          d = std::abs(gauss(rng));
          norm += d * d;
        }
        norm = std::sqrt(norm);
        for (auto& d : dir) d /= (norm > 0 ? norm : 1.0);
        const NumericSystem& target = (k % 4 == 1) ? na : nb;
        std::vector<double> dir_t = (k % 4 == 1) ? dir : reorder(nb, a.variables, dir);
        double t = ray_exit(target, dir_t);
        if (std::isfinite(t)) {
          double jitter = (2.0 * unit(rng) - 1.0) * 1e-4;
          for (std::size_t i = 0; i < dim; ++i) x[i] = t * (1.0 + jitter) * dir[i];
          placed = true;
        }
      }
      if (!placed)
        for (auto& xi : x) xi = unit(rng) * box;

      bool in_a = na.contains(x, tol);
      bool in_b = nb.contains(reorder(nb, a.variables, x), tol);
      ++report.points_checked;
      if (in_a != in_b) {
        report.agree = false;
        ++report.disagreements;
        if (report.witnesses.size() < 10) report.witnesses.push_back({vi, x, in_a, in_b});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Text format

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column) {}

namespace {

struct Term {
  Rational coeff;
  std::string name;  // empty for a bare constant
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

Rational parse_rational(const std::string& tok, std::size_t line, std::size_t col) {
  auto bad = [&] { throw ParseError(line, col, "malformed number '" + tok + "'"); };
  if (tok.empty()) bad();
  auto slash = tok.find('/');
  if (slash != std::string::npos) {
    std::string num = tok.substr(0, slash), den = tok.substr(slash + 1);
    if (num.empty() || den.empty() ||
        !std::all_of(num.begin(), num.end(), ::isdigit) ||
        !std::all_of(den.begin(), den.end(), ::isdigit))
      bad();
    Rational q(num + "/" + den);
    if (q.get_den() == 0) bad();
    q.canonicalize();
    return q;
  }
  auto dot = tok.find('.');
  std::string ip = tok.substr(0, dot);
  std::string fp = dot == std::string::npos ? "" : tok.substr(dot + 1);
  if ((ip.empty() && fp.empty()) || !std::all_of(ip.begin(), ip.end(), ::isdigit) ||
      !std::all_of(fp.begin(), fp.end(), ::isdigit) ||
      (dot != std::string::npos && fp.empty()))
    bad();
  mpz_class num(ip.empty() ? "0" : ip);
  mpz_class den = 1;
  for (char c : fp) {
    num = num * 10 + (c - '0');
    den *= 10;
  }
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Parses one side of a constraint starting at column offset `base`.
std::vector<Term> parse_side(const std::string& text, std::size_t line, std::size_t base) {
  std::vector<Term> terms;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && is_space(text[i])) ++i;
  };
  skip();
  if (i == text.size()) throw ParseError(line, base + i + 1, "empty side");
  bool first = true;
  while (i < text.size()) {
    int sign = 1;
    std::size_t term_col = base + i + 1;
    if (text[i] == '+' || text[i] == '-') {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
      skip();
    } else if (!first) {
      throw ParseError(line, term_col, "expected '+' or '-' between terms");
    }
    first = false;
    if (i == text.size()) throw ParseError(line, base + i + 1, "dangling sign");
    std::size_t start = i;
    Rational coeff = 1;
    bool have_number = false;
    if (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.') {
      while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
                                 text[i] == '/'))
        ++i;
      coeff = parse_rational(text.substr(start, i - start), line, base + start + 1);
      have_number = true;
      skip();
      if (i < text.size() && text[i] == '*') {
        ++i;
        skip();
      } else {
        terms.push_back({sign * coeff, ""});
        continue;
      }
    }
    std::size_t name_start = i;
    int depth = 0;
    while (i < text.size()) {
      char c = text[i];
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) throw ParseError(line, base + i + 1, "unbalanced ')'");
        --depth;
      }
      if (depth == 0 && (is_space(c) || c == '+' || c == '-' || c == '*')) break;
      ++i;
    }
    if (depth != 0) throw ParseError(line, base + name_start + 1, "unbalanced '('");
    if (i == name_start)
      throw ParseError(line, base + name_start + 1, have_number ? "expected name after '*'" : "expected term");
    std::string name = text.substr(name_start, i - name_start);
    if (std::isdigit(static_cast<unsigned char>(name[0])))
      throw ParseError(line, base + name_start + 1, "name cannot start with a digit");
    terms.push_back({sign * coeff, std::move(name)});
    skip();
  }
  return terms;
}

std::string format_rational_term(const Rational& q, const std::string& name, bool leading) {
  std::string out;
  Rational mag = abs(q);
  if (leading)
    out = q < 0 ? "-" : "";
  else
    out = q < 0 ? " - " : " + ";
  if (name.empty()) return out + mag.get_str();
  if (mag != 1) out += mag.get_str() + "*";
  return out + name;
}

}  // namespace

ConstraintSystem parse_system(const std::string& text) {
  ConstraintSystem sys;
  bool declared = false;
  std::set<std::string> var_set;
  struct Pending {
    std::vector<Term> lhs, rhs;
    std::size_t line;
  };
  std::vector<Pending> pending;
  std::vector<std::string> seen_order;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (std::all_of(line.begin(), line.end(), is_space)) continue;

    std::size_t first = line.find_first_not_of(" \t\r");
    if (line.compare(first, 5, "vars:") == 0) {
      if (declared) throw ParseError(line_no, first + 1, "second 'vars:' line");
      if (!pending.empty()) throw ParseError(line_no, first + 1, "'vars:' must precede constraints");
      declared = true;
      std::string rest = line.substr(first + 5);
      std::size_t start = 0;
      while (start <= rest.size()) {
        auto comma = rest.find(',', start);
        if (comma == std::string::npos) comma = rest.size();
        std::string tok = rest.substr(start, comma - start);
        auto b = tok.find_first_not_of(" \t\r");
        auto e = tok.find_last_not_of(" \t\r");
        if (b != std::string::npos) {
          tok = tok.substr(b, e - b + 1);
          if (!var_set.insert(tok).second)
            throw ParseError(line_no, first + 6 + start, "duplicate variable " + tok);
          sys.variables.push_back(tok);
        }
        start = comma + 1;
      }
      continue;
    }
    auto le = line.find("<=");
    if (le == std::string::npos) throw ParseError(line_no, first + 1, "missing '<='");
    if (line.find("<=", le + 2) != std::string::npos)
      throw ParseError(line_no, line.find("<=", le + 2) + 1, "more than one '<='");
    Pending p;
    p.line = line_no;
    p.lhs = parse_side(line.substr(0, le), line_no, 0);
    p.rhs = parse_side(line.substr(le + 2), line_no, le + 2);
    if (!declared)
      for (const auto& t : p.lhs)
        if (!t.name.empty() && var_set.insert(t.name).second) seen_order.push_back(t.name);
    pending.push_back(std::move(p));
  }
  if (!declared) sys.variables = seen_order;

  for (const auto& p : pending) {
    LinearConstraint c;
    auto put_var = [&](const std::string& v, const Rational& q) {
      Rational& slot = c.lhs[v];
      slot += q;
      if (slot == 0) c.lhs.erase(v);
    };
    for (const auto& t : p.lhs) {
      if (t.name.empty())
        c.rhs.constant -= t.coeff;
      else if (var_set.count(t.name))
        put_var(t.name, t.coeff);
      else
        c.rhs.add(t.name, -t.coeff);
    }
    for (const auto& t : p.rhs) {
      if (t.name.empty())
        c.rhs.constant += t.coeff;
      else if (var_set.count(t.name))
        put_var(t.name, -t.coeff);
      else
        c.rhs.add(t.name, t.coeff);
    }
    sys.constraints.push_back(std::move(c));
  }
  return sys;
}

std::string format_constraint(const LinearConstraint& c) {
  std::string out;
  bool leading = true;
  for (const auto& [v, q] : c.lhs) {
    out += format_rational_term(q, v, leading);
    leading = false;
  }
  if (leading) out = "0";
  out += " <= ";
  leading = true;
  for (const auto& [a, q] : c.rhs.terms) {
    out += format_rational_term(q, a, leading);
    leading = false;
  }
  if (c.rhs.constant != 0 || leading) {
    out += format_rational_term(c.rhs.constant, "", leading);
  }
  return out;
}

std::string format_system(const ConstraintSystem& system) {
  std::string out = "vars: ";
  for (std::size_t i = 0; i < system.variables.size(); ++i) {
    if (i) out += ", ";
    out += system.variables[i];
  }
  out += "\n";
  for (const auto& c : system.constraints) out += format_constraint(c) + "\n";
  return out;
}

}  // namespace cranrate
