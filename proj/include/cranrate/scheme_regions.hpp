#pragma once

#include <string>
#include <vector>

#include "cranrate/atoms.hpp"
#include "cranrate/gaussian_info.hpp"
#include "cranrate/polytope.hpp"

namespace cranrate {

// Atom names used by every generator: capacities are "C1", "C2" (fronthaul)
// and "C12", "C21" (cooperation, Ckj is the link from BS j to BS k);
// auxiliaries are U0..U2, V0..V2; channel outputs Y1, Y2.
const std::vector<std::string>& gds_auxiliary_rates();  // Ru0 Ru1 Ru2 Rv0 Rv1 Rv2

// The multicoding system over R1, R2 and the six auxiliary rates (66
// constraints, closure form). Auxiliary-rate nonnegativity is not included.
ConstraintSystem gds_theorem1_system();

// General keeps the full joint law and only projects out the auxiliary rates.
// Largest uniform margin by which (r1, r2) meets the multicoding system for
// some nonnegative auxiliary rates; negative when the point lies outside the
// projected region. See max_uniform_margin.
double theorem1_margin(const AtomValuation& valuation, double r1, double r2);

enum class GdsRestriction { General, SchemeI, SchemeII, SchemeIII, SingleBs, SingleUser };

struct GdsSubstitution {
  AtomSubstitution atoms;
  std::vector<std::string> zero_rates;  // fixed to 0 before elimination
  std::vector<std::string> eliminate;   // projected out, in this order
};

GdsSubstitution gds_substitution(GdsRestriction restriction);

// Rewrites every rhs atom under the substitution; vanishing atoms are dropped.
ConstraintSystem substitute_atoms(const ConstraintSystem& system, const AtomSubstitution& sub);

// The system gds_project eliminates from: substituted, zeroed, with
// nonnegativity of the remaining auxiliary rates and rows that hold for every
// valuation removed.
ConstraintSystem gds_lifted(const ConstraintSystem& system, GdsRestriction restriction);

// Applies the substitution, adds nonnegativity of the surviving auxiliary
// rates and eliminates them. The result lives over {R1, R2} ({R1} for the
// single-user restriction).
ConstraintSystem gds_project(const ConstraintSystem& system, GdsRestriction restriction,
                             const FmeOptions& options = {});

// Explicit regions over {R1, R2}.
ConstraintSystem scheme1_region();
ConstraintSystem scheme2_region();
ConstraintSystem scheme3_region();
ConstraintSystem corollary4_region();  // single BS, auxiliaries U, V
ConstraintSystem corollary5_region();  // single user, over {R1}

// Side conditions lhs < rhs restricting the pmf for the private-only scheme.
struct SideCondition {
  AffineExpr lhs;
  AffineExpr rhs;
};
std::vector<SideCondition> scheme3_side_conditions();
// Every side condition holds up to tol (lhs <= rhs + tol).
bool scheme3_feasible(const AtomValuation& valuation, double tol = 1e-9);

double corollary5_rate(const AtomValuation& valuation);

// Compression region with cloud center X0 over {R1, R2}.
ConstraintSystem gcomp_theorem2_region();

// Distributed decode-forward region for N BSs and L users over {R1..RL}: one
// constraint per (S subset of BSs, nonempty D subset of users).
ConstraintSystem ddf_p1_region(std::size_t n_bs, std::size_t n_users);

// Cut-set region for a Gaussian input covariance K (N x N, diag <= P).
ConstraintSystem cutset_region(const CranNetwork& network, const Eigen::MatrixXd& k);
double cutset_symmetric_sumrate(double c, double rsum_star);

// Largest R1 + R2 over the closed region intersected with the nonnegative
// quadrant. Returns 0 when the origin is infeasible.
double max_sum_rate(const NumericSystem& region);

// Region export: {"variables": [...], "constraints": [{"lhs": {...}, "rhs": v, "expr": "..."}]}.
std::string region_to_json(const ConstraintSystem& system, const AtomValuation& valuation);

// Names of every atom the system references, minus the capacity constants.
std::vector<std::string> information_atoms(const ConstraintSystem& system);
bool is_capacity_constant(const std::string& atom);

}  // namespace cranrate
