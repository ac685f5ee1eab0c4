#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cranrate {

// An atom is one symbolic information quantity (or a link capacity) that may
// appear on the right-hand side of a rate constraint. Atoms are identified by
// their canonical name; the structured form below is only needed to evaluate
// them against a distribution or to rewrite them under a substitution.
enum class AtomKind { Entropy, MutualInfo, TotalCorrelation, Constant };

using VarList = std::vector<std::string>;

struct AtomSpec {
  AtomKind kind = AtomKind::Constant;
  // Entropy:          {A, C}     -> H(A|C)
  // MutualInfo:       {A, B, C}  -> I(A;B|C)
  // TotalCorrelation: {Omega}    -> Gamma(Omega)
  // Constant:         {}         -> name
  std::vector<VarList> sets;
  std::string name;

  // True when the quantity vanishes for every distribution (e.g. I(A;B) with
  // A empty, or Gamma of a single variable).
  bool trivially_zero() const;
};

AtomSpec entropy_atom(VarList a, VarList given = {});
AtomSpec mutual_info_atom(VarList a, VarList b, VarList given = {});
AtomSpec total_correlation_atom(VarList omega);
AtomSpec constant_atom(std::string name);

// Sorts and deduplicates variable lists, removes conditioning variables from
// the other sets and orders the two sides of a mutual information, so that
// equal quantities get equal names.
AtomSpec normalize(AtomSpec atom);

// "H(A|C)", "I(A,B;C|D)", "Gamma(A,B,C)" or the bare constant name.
std::string canonical_name(const AtomSpec& atom);

// Inverse of canonical_name (accepts any variable order). Names without a
// recognized "H(", "I(" or "Gamma(" prefix parse as constants.
AtomSpec parse_atom(std::string_view name);

// Rewrites performed on atoms when a scheme restricts the auxiliary
// structure: degenerate variables are removed, variables are renamed and
// atoms that vanish under an independence assumption are dropped.
struct AtomSubstitution {
  std::set<std::string> degenerate;
  std::map<std::string, std::string> rename;
  std::set<std::string> zero_constants;
  // Variables that are mutually independent. I(A;B|C) with A, B, C inside
  // this set and A, B disjoint vanishes, as does Gamma over the set.
  std::set<std::string> independent;
};

// Returns std::nullopt when the atom becomes identically zero.
std::optional<AtomSpec> substitute(const AtomSpec& atom, const AtomSubstitution& sub);

}  // namespace cranrate
