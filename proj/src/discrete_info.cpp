#include "cranrate/discrete_info.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace cranrate {

namespace {

constexpr double kSumTol = 1e-12;

std::size_t state_count(const std::vector<Variable>& vars) {
  std::size_t n = 1;
  for (const auto& v : vars) {
    if (v.size == 0) throw std::invalid_argument("alphabet size of " + v.name + " must be >= 1");
    if (n > kMaxStates / v.size) throw std::length_error("state space exceeds 10^7 entries");
    n *= v.size;
  }
  return n;
}

void check_names(const std::vector<Variable>& vars) {
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (v.name.empty()) throw std::invalid_argument("empty variable name");
    if (!seen.insert(v.name).second) throw std::invalid_argument("duplicate variable " + v.name);
  }
}

double plogp_sum(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------

JointPmf::JointPmf(std::vector<Variable> variables, std::vector<double> probs)
    : vars_(std::move(variables)), probs_(std::move(probs)) {
  check_names(vars_);
  if (vars_.size() > 64) throw std::invalid_argument("at most 64 variables are supported");
  std::size_t n = state_count(vars_);
  if (probs_.size() != n)
    throw std::invalid_argument("pmf has " + std::to_string(probs_.size()) + " entries, expected " +
                                std::to_string(n));
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative or NaN probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTol)
    throw std::invalid_argument("probabilities sum to " + std::to_string(total));
  strides_.assign(vars_.size(), 1);
  for (std::size_t i = vars_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * vars_[i].size;
  for (std::size_t k = 0; k < probs_.size(); ++k)
    if (probs_[k] > 0.0) support_.push_back(k);
}

std::size_t JointPmf::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return i;
  throw std::out_of_range("unknown variable " + name);
}

bool JointPmf::has(const std::string& name) const {
  return std::any_of(vars_.begin(), vars_.end(), [&](const Variable& v) { return v.name == name; });
}

std::uint64_t JointPmf::mask_of(const VarList& names) const {
  std::uint64_t m = 0;
  for (const auto& n : names) m |= std::uint64_t{1} << index_of(n);
  return m;
}

double JointPmf::entropy_mask(std::uint64_t mask) const {
  if (mask == 0) return 0.0;
  std::vector<std::size_t> sel;
  std::size_t size = 1;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (mask >> i & 1) {
      sel.push_back(i);
      size *= vars_[i].size;
    }
  std::vector<double> marg(size, 0.0);
  for (std::size_t k : support_) {
    std::size_t key = 0;
    for (std::size_t i : sel) key = key * vars_[i].size + digit(k, i);
    marg[key] += probs_[k];
  }
  return plogp_sum(marg);
}

// ---------------------------------------------------------------------------

Channel::Channel(std::vector<Variable> inputs, std::vector<Variable> outputs, std::vector<double> probs)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), probs_(std::move(probs)) {
  std::vector<Variable> all = inputs_;
  all.insert(all.end(), outputs_.begin(), outputs_.end());
  check_names(all);
  if (outputs_.empty()) throw std::invalid_argument("channel without outputs");
  in_states_ = state_count(inputs_);
  out_states_ = state_count(outputs_);
  state_count(all);
  if (probs_.size() != in_states_ * out_states_)
    throw std::invalid_argument("channel has " + std::to_string(probs_.size()) + " entries, expected " +
                                std::to_string(in_states_ * out_states_));
  for (std::size_t x = 0; x < in_states_; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < out_states_; ++y) {
      double p = at(x, y);
      if (!(p >= 0.0)) throw std::invalid_argument("negative or NaN transition probability");
      s += p;
    }
    if (std::abs(s - 1.0) > kSumTol)
      throw std::invalid_argument("conditional slice " + std::to_string(x) + " sums to " + std::to_string(s));
  }
}

Channel deterministic_channel(std::vector<Variable> inputs, Variable output,
                              const std::function<std::size_t(const std::vector<std::size_t>&)>& fn) {
  std::size_t n_in = state_count(inputs);
  std::vector<double> probs(n_in * output.size, 0.0);
  std::vector<std::size_t> digits(inputs.size());
  for (std::size_t x = 0; x < n_in; ++x) {
    std::size_t rest = x;
    for (std::size_t i = inputs.size(); i-- > 0;) {
      digits[i] = rest % inputs[i].size;
      rest /= inputs[i].size;
    }
    std::size_t y = fn(digits);
    if (y >= output.size) throw std::out_of_range("deterministic map outside output alphabet");
    probs[x * output.size + y] = 1.0;
  }
  return Channel(std::move(inputs), {std::move(output)}, std::move(probs));
}

Channel bsc(double crossover, const std::string& in, const std::string& out) {
  if (!(crossover >= 0.0 && crossover <= 1.0)) throw std::invalid_argument("crossover outside [0,1]");
  return Channel({{in, 2}}, {{out, 2}}, {1 - crossover, crossover, crossover, 1 - crossover});
}

// ---------------------------------------------------------------------------

JointPmf marginalize(const JointPmf& pmf, const VarList& keep) {
  std::set<std::size_t> idx;
  for (const auto& n : keep) idx.insert(pmf.index_of(n));
  std::vector<Variable> vars;
  for (std::size_t i : idx) vars.push_back(pmf.variables()[i]);
  std::vector<double> probs(state_count(vars), 0.0);
  for (std::size_t k : pmf.support()) {
    std::size_t key = 0;
    for (std::size_t i : idx) key = key * pmf.variables()[i].size + pmf.digit(k, i);
    probs[key] += pmf.probs()[k];
  }
  return JointPmf(std::move(vars), std::move(probs));
}

JointPmf compose(const JointPmf& pmf, const Channel& channel) {
  std::vector<std::size_t> in_idx;
  for (const auto& v : channel.inputs()) {
    std::size_t i = pmf.index_of(v.name);
    if (pmf.variables()[i].size != v.size)
      throw std::invalid_argument("alphabet size mismatch for channel input " + v.name);
    in_idx.push_back(i);
  }
  for (const auto& v : channel.outputs())
    if (pmf.has(v.name)) throw std::invalid_argument("channel output " + v.name + " already in pmf");
  std::vector<Variable> vars = pmf.variables();
  vars.insert(vars.end(), channel.outputs().begin(), channel.outputs().end());
  const std::size_t n_out = channel.output_states();
  std::vector<double> probs(state_count(vars), 0.0);
  for (std::size_t k : pmf.support()) {
    std::size_t x = 0;
    for (std::size_t j = 0; j < in_idx.size(); ++j) x = x * channel.inputs()[j].size + pmf.digit(k, in_idx[j]);
    for (std::size_t y = 0; y < n_out; ++y) probs[k * n_out + y] = pmf.probs()[k] * channel.at(x, y);
  }
  return JointPmf(std::move(vars), std::move(probs));
}

JointPmf product(const JointPmf& a, const JointPmf& b) {
  std::vector<Variable> vars = a.variables();
  vars.insert(vars.end(), b.variables().begin(), b.variables().end());
  std::vector<double> probs(state_count(vars), 0.0);
  for (std::size_t i = 0; i < a.num_states(); ++i)
    for (std::size_t j = 0; j < b.num_states(); ++j) probs[i * b.num_states() + j] = a.probs()[i] * b.probs()[j];
  return JointPmf(std::move(vars), std::move(probs));
}

double entropy(const JointPmf& pmf, const VarList& s) {
  if (s.empty()) throw std::invalid_argument("entropy of an empty variable set");
  return pmf.entropy_mask(pmf.mask_of(s));
}

double mutual_info(const JointPmf& pmf, const VarList& a, const VarList& b, const VarList& c) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mutual information needs nonempty sets");
  std::uint64_t ma = pmf.mask_of(a), mb = pmf.mask_of(b), mc = pmf.mask_of(c);
  if ((ma & mb) || (ma & mc) || (mb & mc)) throw std::invalid_argument("mutual information sets overlap");
  double v = pmf.entropy_mask(ma | mc) + pmf.entropy_mask(mb | mc) - pmf.entropy_mask(ma | mb | mc) -
             pmf.entropy_mask(mc);
  return std::max(0.0, v);
}

double total_correlation(const JointPmf& pmf, const VarList& omega) {
  if (omega.empty()) throw std::invalid_argument("total correlation of an empty set");
  double sum = 0.0;
  std::uint64_t all = 0;
  for (const auto& n : omega) {
    std::uint64_t m = pmf.mask_of({n});
    all |= m;
    sum += pmf.entropy_mask(m);
  }
  return std::max(0.0, sum - pmf.entropy_mask(all));
}

// ---------------------------------------------------------------------------

BlahutArimotoResult blahut_arimoto(const Channel& channel, double tol, std::size_t max_iter) {
  const std::size_t nx = channel.input_states(), ny = channel.output_states();
  BlahutArimotoResult res;
  std::vector<double> p(nx, 1.0 / static_cast<double>(nx)), q(ny), d(nx);
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) q[y] += p[x] * channel.at(x, y);
    // d[x] = D(W(.|x) || q) in bits
    for (std::size_t x = 0; x < nx; ++x) {
      double s = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        double w = channel.at(x, y);
        if (w > 0.0) s += w * std::log2(w / q[y]);
      }
      d[x] = s;
    }
    double lower = 0.0;
    for (std::size_t x = 0; x < nx; ++x) lower += p[x] * d[x];
    double upper = *std::max_element(d.begin(), d.end());
    res.iterates.push_back(lower);
    res.iterations = it + 1;
    if (upper - lower <= tol) {
      res.capacity = std::max(0.0, lower);
      res.input_pmf = p;
      return res;
    }
    double z = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      p[x] *= std::exp2(d[x]);
      z += p[x];
    }
    for (auto& px : p) px /= z;
  }
  throw ConvergenceError("Blahut-Arimoto did not converge in " + std::to_string(max_iter) + " iterations");
}

// ---------------------------------------------------------------------------

double EntropyCache::entropy_mask(std::uint64_t mask) {
  auto it = cache_.find(mask);
  if (it != cache_.end()) return it->second;
  double h = pmf_.entropy_mask(mask);
  cache_.emplace(mask, h);
  return h;
}

double EntropyCache::entropy(const VarList& s) { return entropy_mask(pmf_.mask_of(s)); }

double EntropyCache::evaluate(const AtomSpec& atom, const std::map<std::string, double>& constants) {
  switch (atom.kind) {
    case AtomKind::Constant: {
      auto it = constants.find(atom.name);
      if (it == constants.end()) throw std::out_of_range("no value for constant " + atom.name);
      return it->second;
    }
    case AtomKind::Entropy: {
      if (atom.sets.size() != 2) throw std::invalid_argument("malformed entropy atom");
      std::uint64_t a = pmf_.mask_of(atom.sets[0]), c = pmf_.mask_of(atom.sets[1]);
      return std::max(0.0, entropy_mask(a | c) - entropy_mask(c));
    }
    case AtomKind::MutualInfo: {
      if (atom.sets.size() != 3) throw std::invalid_argument("malformed mutual information atom");
      std::uint64_t a = pmf_.mask_of(atom.sets[0]), b = pmf_.mask_of(atom.sets[1]), c = pmf_.mask_of(atom.sets[2]);
      if (a == 0 || b == 0) return 0.0;
      double v = entropy_mask(a | c) + entropy_mask(b | c) - entropy_mask(a | b | c) - entropy_mask(c);
      return std::max(0.0, v);
    }
    case AtomKind::TotalCorrelation: {
      if (atom.sets.size() != 1) throw std::invalid_argument("malformed total correlation atom");
      double sum = 0.0;
      std::uint64_t all = 0;
      for (const auto& n : atom.sets[0]) {
        std::uint64_t m = pmf_.mask_of({n});
        all |= m;
        sum += entropy_mask(m);
      }
      return std::max(0.0, sum - entropy_mask(all));
    }
  }
  throw std::invalid_argument("unknown atom kind");
}

AtomValuation atom_valuation(const JointPmf& pmf, const std::vector<AtomSpec>& atoms,
                             const std::map<std::string, double>& constants) {
  EntropyCache cache(pmf);
  AtomValuation out;
  for (const auto& a : atoms) out[canonical_name(a)] = cache.evaluate(a, constants);
  return out;
}

AtomValuation atom_valuation(const JointPmf& pmf, const std::vector<std::string>& atom_names,
                             const std::map<std::string, double>& constants) {
  EntropyCache cache(pmf);
  AtomValuation out;
  for (const auto& n : atom_names) out[n] = cache.evaluate(parse_atom(n), constants);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Variable> vars_from_json(const nlohmann::json& j, const char* key) {
  std::vector<Variable> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back({v.at("name").get<std::string>(), v.at("size").get<std::size_t>()});
  return out;
}

nlohmann::json vars_to_json(const std::vector<Variable>& vars) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : vars) arr.push_back({{"name", v.name}, {"size", v.size}});
  return arr;
}

}  // namespace

JointPmf pmf_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (!j.contains("variables") || !j.contains("probs"))
    throw std::invalid_argument("pmf JSON needs \"variables\" and \"probs\"");
  return JointPmf(vars_from_json(j, "variables"), j.at("probs").get<std::vector<double>>());
}

std::string pmf_to_json(const JointPmf& pmf) {
  nlohmann::json j;
  j["variables"] = vars_to_json(pmf.variables());
  j["probs"] = pmf.probs();
  return j.dump();
}

Channel channel_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (!j.contains("variables") || !j.contains("probs"))
    throw std::invalid_argument("channel JSON needs \"variables\", \"given\" and \"probs\"");
  return Channel(vars_from_json(j, "given"), vars_from_json(j, "variables"),
                 j.at("probs").get<std::vector<double>>());
}

std::string channel_to_json(const Channel& channel) {
  nlohmann::json j;
  j["given"] = vars_to_json(channel.inputs());
  j["variables"] = vars_to_json(channel.outputs());
  j["probs"] = channel.probs();
  return j.dump();
}

}  // namespace cranrate
