#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cranrate/atoms.hpp"
#include "cranrate/polytope.hpp"

namespace cranrate {

struct Variable {
  std::string name;
  std::size_t size = 1;
};

// Largest dense tensor a pmf or channel may hold.
inline constexpr std::size_t kMaxStates = 10'000'000;

// Dense probability tensor over named finite-alphabet variables, row-major
// with the last variable fastest.
class JointPmf {
 public:
  JointPmf(std::vector<Variable> variables, std::vector<double> probs);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t num_states() const { return probs_.size(); }
  std::size_t index_of(const std::string& name) const;
  bool has(const std::string& name) const;

  // Digit of variable `var` in the flat index `flat`.
  std::size_t digit(std::size_t flat, std::size_t var) const { return (flat / strides_[var]) % vars_[var].size; }
  // Flat indices with nonzero probability.
  const std::vector<std::size_t>& support() const { return support_; }

  // H of the variables selected by a bitmask over variables().
  double entropy_mask(std::uint64_t mask) const;
  std::uint64_t mask_of(const VarList& names) const;

 private:
  std::vector<Variable> vars_;
  std::vector<double> probs_;
  std::vector<std::size_t> strides_;
  std::vector<std::size_t> support_;
};

// Conditional pmf p(outputs | inputs), row-major over inputs then outputs so
// every contiguous block of output entries is one conditional slice.
class Channel {
 public:
  Channel(std::vector<Variable> inputs, std::vector<Variable> outputs, std::vector<double> probs);

  const std::vector<Variable>& inputs() const { return inputs_; }
  const std::vector<Variable>& outputs() const { return outputs_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t input_states() const { return in_states_; }
  std::size_t output_states() const { return out_states_; }
  double at(std::size_t in, std::size_t out) const { return probs_[in * out_states_ + out]; }

 private:
  std::vector<Variable> inputs_, outputs_;
  std::vector<double> probs_;
  std::size_t in_states_ = 1, out_states_ = 1;
};

// Deterministic channel output = fn(inputs) where fn receives input digits.
Channel deterministic_channel(std::vector<Variable> inputs, Variable output,
                              const std::function<std::size_t(const std::vector<std::size_t>&)>& fn);
Channel bsc(double crossover, const std::string& in = "X", const std::string& out = "Y");

JointPmf marginalize(const JointPmf& pmf, const VarList& keep);
JointPmf compose(const JointPmf& pmf, const Channel& channel);
JointPmf product(const JointPmf& a, const JointPmf& b);

double entropy(const JointPmf& pmf, const VarList& s);
double mutual_info(const JointPmf& pmf, const VarList& a, const VarList& b, const VarList& c = {});
double total_correlation(const JointPmf& pmf, const VarList& omega);

struct BlahutArimotoResult {
  double capacity = 0.0;
  std::vector<double> input_pmf;
  std::vector<double> iterates;  // I(p_t; W) per iteration
  std::size_t iterations = 0;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stops once the standard upper bound max_x D(W(.|x) || q) is within tol of
// the current mutual information.
BlahutArimotoResult blahut_arimoto(const Channel& channel, double tol = 1e-9, std::size_t max_iter = 100000);

// Memoized subset entropies of one pmf; evaluates structured atoms.
class EntropyCache {
 public:
  explicit EntropyCache(const JointPmf& pmf) : pmf_(pmf) {}
  double entropy(const VarList& s);
  double evaluate(const AtomSpec& atom, const std::map<std::string, double>& constants = {});

 private:
  double entropy_mask(std::uint64_t mask);
  const JointPmf& pmf_;
  std::unordered_map<std::uint64_t, double> cache_;
};

// Values every atom by name. Constants are looked up in `constants`.
AtomValuation atom_valuation(const JointPmf& pmf, const std::vector<AtomSpec>& atoms,
                             const std::map<std::string, double>& constants = {});
// Same, for atom names (parsed with parse_atom).
AtomValuation atom_valuation(const JointPmf& pmf, const std::vector<std::string>& atom_names,
                             const std::map<std::string, double>& constants = {});

JointPmf pmf_from_json(const std::string& text);
std::string pmf_to_json(const JointPmf& pmf);
Channel channel_from_json(const std::string& text);
std::string channel_to_json(const Channel& channel);

}  // namespace cranrate
