#include "doctest.h"

#include "cranrate/atoms.hpp"

using namespace cranrate;

TEST_CASE("canonical names sort variable lists") {
  CHECK(canonical_name(mutual_info_atom({"U1", "U0"}, {"Y1"})) == "I(U0,U1;Y1)");
  CHECK(canonical_name(mutual_info_atom({"Y1"}, {"U1", "U0"})) == "I(U0,U1;Y1)");
  CHECK(canonical_name(entropy_atom({"B", "A"}, {"C"})) == "H(A,B|C)");
  CHECK(canonical_name(total_correlation_atom({"V0", "U0", "U2"})) == "Gamma(U0,U2,V0)");
  CHECK(canonical_name(constant_atom("C12")) == "C12");
}

TEST_CASE("conditioning variables drop out of the other sets") {
  CHECK(canonical_name(mutual_info_atom({"A", "C"}, {"B"}, {"C"})) == "I(A;B|C)");
}

TEST_CASE("parse_atom inverts canonical_name") {
  for (const char* name : {"I(U0,U1;Y1)", "H(A|B,C)", "H(X)", "Gamma(U0,V0,U2)", "C1", "I(X1;X2|X0)"}) {
    auto atom = parse_atom(name);
    CHECK(parse_atom(canonical_name(atom)).sets == atom.sets);
  }
  CHECK(canonical_name(parse_atom("Gamma(V0,U0)")) == "Gamma(U0,V0)");
  CHECK_THROWS(parse_atom("I(A,B)"));
}

TEST_CASE("degenerate variables vanish") {
  AtomSubstitution sub;
  sub.degenerate = {"U1", "V1"};
  CHECK_FALSE(substitute(total_correlation_atom({"U0", "U1"}), sub).has_value());
  auto g = substitute(total_correlation_atom({"U0", "U1", "V0"}), sub);
  REQUIRE(g);
  CHECK(canonical_name(*g) == "Gamma(U0,V0)");
  CHECK_FALSE(substitute(mutual_info_atom({"U1"}, {"Y1"}), sub).has_value());
}

TEST_CASE("renames and zeroed constants") {
  AtomSubstitution sub;
  sub.rename = {{"U1", "U"}};
  sub.zero_constants = {"C2"};
  CHECK(canonical_name(*substitute(mutual_info_atom({"U1"}, {"Y1"}), sub)) == "I(U;Y1)");
  CHECK_FALSE(substitute(constant_atom("C2"), sub).has_value());
  CHECK(substitute(constant_atom("C1"), sub)->name == "C1");
}

TEST_CASE("independence rewrites") {
  AtomSubstitution sub;
  sub.independent = {"U0", "U1", "U2"};
  CHECK_FALSE(substitute(total_correlation_atom({"U0", "U1", "U2"}), sub).has_value());
  auto r = substitute(mutual_info_atom({"U0"}, {"U1", "Y1"}), sub);
  REQUIRE(r);
  CHECK(canonical_name(*r) == "I(U0;Y1|U1)");
  CHECK_FALSE(substitute(mutual_info_atom({"U0"}, {"U1"}), sub).has_value());
}
