#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace cranrate {

using Rational = mpq_class;

// Values of atoms in bits. Missing entries are an error at evaluation time.
using AtomValuation = std::map<std::string, double>;
using RatePoint = std::map<std::string, double>;

class FmeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// constant + sum_i coeff_i * atom_i, exact coefficients. Zero coefficients
// are never stored.
struct AffineExpr {
  std::map<std::string, Rational> terms;
  Rational constant = 0;

  AffineExpr() = default;
  explicit AffineExpr(Rational c) : constant(std::move(c)) {}

  AffineExpr& add(const std::string& atom, const Rational& coeff);
  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator*=(const Rational& k);

  double evaluate(const AtomValuation& valuation) const;
  bool operator==(const AffineExpr& other) const {
    return constant == other.constant && terms == other.terms;
  }
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator*(const Rational& k, AffineExpr a);

// sum_v lhs[v] * v <= rhs. Regions are kept in closure form, so every
// constraint is non-strict.
struct LinearConstraint {
  std::map<std::string, Rational> lhs;
  AffineExpr rhs;

  bool lhs_is_zero() const { return lhs.empty(); }
  bool operator==(const LinearConstraint& other) const {
    return lhs == other.lhs && rhs == other.rhs;
  }
};

struct ConstraintSystem {
  std::vector<std::string> variables;
  std::vector<LinearConstraint> constraints;

  // Throws std::invalid_argument if a constraint uses an undeclared variable.
  void validate() const;
  void add(LinearConstraint c);
  std::vector<std::string> atoms() const;
  bool has_variable(const std::string& v) const;
};

struct FmeOptions {
  std::size_t max_constraints = 100000;
};

// Projects out one variable (standard upper/lower pairing plus carry-over).
ConstraintSystem fme_eliminate(const ConstraintSystem& system, const std::string& var,
                               const FmeOptions& options = {});

// Projects out several variables in the given order. Intermediate
// constraints whose combination history shows they are not extreme
// (Chernikov's rules) are dropped; the result describes the same set for
// every atom valuation.
ConstraintSystem fme_eliminate(const ConstraintSystem& system,
                               const std::vector<std::string>& vars,
                               const FmeOptions& options = {});

// Removes duplicates, scaled copies and constraints that differ from another
// only by a larger constant, plus constraints that hold identically (0 <= c,
// c >= 0). Never changes the solution set.
ConstraintSystem syntactic_reduce(const ConstraintSystem& system);

// Fixes variables to zero: their lhs terms are dropped and they are removed
// from the variable list.
ConstraintSystem zero_variables(const ConstraintSystem& system,
                                const std::vector<std::string>& vars);

// A constraint system with every rhs resolved against one valuation.
struct NumericSystem {
  std::vector<std::string> variables;
  std::vector<std::vector<double>> lhs;  // constraints x variables
  std::vector<double> rhs;

  // Minimum over constraints of rhs - lhs.x (positive inside the region).
  double min_slack(const std::vector<double>& point) const;
  bool contains(const std::vector<double>& point, double tol) const {
    return min_slack(point) >= -tol;
  }
};

NumericSystem resolve(const ConstraintSystem& system, const AtomValuation& valuation);

// Largest t such that, with the `fixed` variables set, some assignment of the
// others meets every constraint that involves a fixed variable with margin t,
// while the remaining constraints and nonnegativity of the variables in
// `nonneg` hold exactly. Two-phase dense simplex with Bland's rule. Returns
// -inf when the exact part is infeasible and +inf when t is unbounded.
double max_uniform_margin(const NumericSystem& system, const std::map<std::string, double>& fixed,
                          const std::vector<std::string>& nonneg, std::size_t max_iterations = 100000);

bool is_member(const ConstraintSystem& system, const AtomValuation& valuation,
               const RatePoint& point, double tol);

struct RegionWitness {
  std::size_t valuation_index = 0;
  std::vector<double> point;
  bool in_a = false;
  bool in_b = false;
};

struct RegionComparison {
  bool agree = true;
  std::size_t points_checked = 0;
  std::size_t disagreements = 0;
  std::vector<RegionWitness> witnesses;  // first 10
};

// Samples n_points rate points per valuation (uniform over a box derived from
// the resolved constraints, and points close to either region's boundary) and
// compares membership. Deterministic for a given seed.
RegionComparison regions_equal_sampled(const ConstraintSystem& a, const ConstraintSystem& b,
                                       const std::vector<AtomValuation>& valuations,
                                       std::size_t n_points, std::uint64_t seed,
                                       double tol = 1e-9);

// Text format: one constraint per line, "<lhs terms> <= <rhs terms>", terms
// "+q*Name", "-Name" or a bare rational, '#' starts a comment. An optional
// "vars: a, b, c" line declares the variable order; otherwise every name on a
// left-hand side is a variable.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

ConstraintSystem parse_system(const std::string& text);
std::string format_system(const ConstraintSystem& system);
std::string format_constraint(const LinearConstraint& c);

}  // namespace cranrate
