#include "cranrate/atoms.hpp"

#include <algorithm>
#include <stdexcept>

namespace cranrate {

namespace {

void sort_unique(VarList& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void remove_all(VarList& v, const VarList& drop) {
  v.erase(std::remove_if(v.begin(), v.end(),
                         [&](const std::string& x) {
                           return std::binary_search(drop.begin(), drop.end(), x);
                         }),
          v.end());
}

std::string join(const VarList& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i];
  }
  return out;
}

VarList split_vars(std::string_view s) {
  VarList out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto pos = s.find(',', start);
    if (pos == std::string_view::npos) pos = s.size();
    auto tok = s.substr(start, pos - start);
    if (!tok.empty()) out.emplace_back(tok);
    start = pos + 1;
  }
  return out;
}

bool subset_of(const VarList& v, const std::set<std::string>& s) {
  return std::all_of(v.begin(), v.end(), [&](const std::string& x) { return s.count(x) > 0; });
}

bool disjoint(const VarList& a, const VarList& b) {
  for (const auto& x : a)
    if (std::binary_search(b.begin(), b.end(), x)) return false;
  return true;
}

}  // namespace

bool AtomSpec::trivially_zero() const {
  switch (kind) {
    case AtomKind::Entropy:
      return sets.at(0).empty();
    case AtomKind::MutualInfo:
      return sets.at(0).empty() || sets.at(1).empty();
    case AtomKind::TotalCorrelation:
      return sets.at(0).size() <= 1;
    case AtomKind::Constant:
      return false;
  }
  return false;
}

AtomSpec entropy_atom(VarList a, VarList given) {
  return normalize(AtomSpec{AtomKind::Entropy, {std::move(a), std::move(given)}, {}});
}

AtomSpec mutual_info_atom(VarList a, VarList b, VarList given) {
  return normalize(
      AtomSpec{AtomKind::MutualInfo, {std::move(a), std::move(b), std::move(given)}, {}});
}

AtomSpec total_correlation_atom(VarList omega) {
  return normalize(AtomSpec{AtomKind::TotalCorrelation, {std::move(omega)}, {}});
}

AtomSpec constant_atom(std::string name) { return AtomSpec{AtomKind::Constant, {}, std::move(name)}; }

AtomSpec normalize(AtomSpec atom) {
  for (auto& s : atom.sets) sort_unique(s);
  switch (atom.kind) {
    case AtomKind::Entropy:
      remove_all(atom.sets[0], atom.sets[1]);
      break;
    case AtomKind::MutualInfo:
      remove_all(atom.sets[0], atom.sets[2]);
      remove_all(atom.sets[1], atom.sets[2]);
      if (join(atom.sets[1]) < join(atom.sets[0])) std::swap(atom.sets[0], atom.sets[1]);
      break;
    default:
      break;
  }
  return atom;
}

std::string canonical_name(const AtomSpec& atom) {
  switch (atom.kind) {
    case AtomKind::Entropy: {
      std::string s = "H(" + join(atom.sets[0]);
      if (!atom.sets[1].empty()) s += "|" + join(atom.sets[1]);
      return s + ")";
    }
    case AtomKind::MutualInfo: {
      std::string s = "I(" + join(atom.sets[0]) + ";" + join(atom.sets[1]);
      if (!atom.sets[2].empty()) s += "|" + join(atom.sets[2]);
      return s + ")";
    }
    case AtomKind::TotalCorrelation:
      return "Gamma(" + join(atom.sets[0]) + ")";
    case AtomKind::Constant:
      return atom.name;
  }
  return {};
}

AtomSpec parse_atom(std::string_view name) {
  auto inner = [&](std::size_t prefix) {
    if (name.back() != ')') throw std::invalid_argument("malformed atom: " + std::string(name));
    return name.substr(prefix, name.size() - prefix - 1);
  };
  if (name.size() > 3 && name.substr(0, 2) == "H(") {
    auto body = inner(2);
    auto bar = body.find('|');
    VarList a = split_vars(body.substr(0, bar));
    VarList c = bar == std::string_view::npos ? VarList{} : split_vars(body.substr(bar + 1));
    return entropy_atom(std::move(a), std::move(c));
  }
  if (name.size() > 3 && name.substr(0, 2) == "I(") {
    auto body = inner(2);
    auto semi = body.find(';');
    if (semi == std::string_view::npos)
      throw std::invalid_argument("mutual information atom without ';': " + std::string(name));
    auto bar = body.find('|', semi);
    VarList a = split_vars(body.substr(0, semi));
    VarList b = split_vars(body.substr(semi + 1, bar == std::string_view::npos ? bar : bar - semi - 1));
    VarList c = bar == std::string_view::npos ? VarList{} : split_vars(body.substr(bar + 1));
    return mutual_info_atom(std::move(a), std::move(b), std::move(c));
  }
  if (name.size() > 7 && name.substr(0, 6) == "Gamma(") {
    return total_correlation_atom(split_vars(inner(6)));
  }
  if (name.empty()) throw std::invalid_argument("empty atom name");
  return constant_atom(std::string(name));
}

std::optional<AtomSpec> substitute(const AtomSpec& atom, const AtomSubstitution& sub) {
  if (atom.kind == AtomKind::Constant) {
    if (sub.zero_constants.count(atom.name)) return std::nullopt;
    return atom;
  }
  AtomSpec out = atom;
  for (auto& set : out.sets) {
    VarList next;
    for (const auto& v : set) {
      if (sub.degenerate.count(v)) continue;
      auto it = sub.rename.find(v);
      next.push_back(it == sub.rename.end() ? v : it->second);
    }
    set = std::move(next);
  }
  out = normalize(std::move(out));
  if (out.trivially_zero()) return std::nullopt;

  if (!sub.independent.empty()) {
    if (out.kind == AtomKind::TotalCorrelation && subset_of(out.sets[0], sub.independent))
      return std::nullopt;
    if (out.kind == AtomKind::MutualInfo && subset_of(out.sets[2], sub.independent)) {
      // I(A; B_ind, B_rest | C) = I(A; B_rest | B_ind, C) when A, B_ind, C
      // are mutually independent.
      for (int side = 0; side < 2; ++side) {
        const VarList& a = out.sets[side];
        const VarList& b = out.sets[1 - side];
        if (!subset_of(a, sub.independent)) continue;
        VarList b_ind, b_rest;
        for (const auto& v : b) (sub.independent.count(v) ? b_ind : b_rest).push_back(v);
        if (!disjoint(a, b_ind)) continue;
        if (b_rest.empty()) return std::nullopt;
        VarList given = out.sets[2];
        given.insert(given.end(), b_ind.begin(), b_ind.end());
        out = mutual_info_atom(a, b_rest, given);
        break;
      }
    }
  }
  return out;
}

}  // namespace cranrate
