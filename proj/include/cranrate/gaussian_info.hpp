#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cranrate/atoms.hpp"
#include "cranrate/polytope.hpp"

namespace cranrate {

struct Component {
  std::string name;
  std::size_t dim = 1;
};

// Covariance of a zero-mean Gaussian vector split into named components.
class JointCovariance {
 public:
  JointCovariance(std::vector<Component> components, Eigen::MatrixXd matrix);

  const std::vector<Component>& components() const { return comps_; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  bool has(const std::string& name) const;
  std::size_t component_index(const std::string& name) const;
  // Scalar coordinates of the listed components, in listing order.
  std::vector<int> coordinates(const VarList& names) const;
  std::uint64_t mask_of(const VarList& names) const;
  std::vector<int> coordinates(std::uint64_t mask) const;
  Eigen::MatrixXd block(const std::vector<int>& rows, const std::vector<int>& cols) const;
  // Largest eigenvalue of the whole matrix; sets the pseudo-inverse scale.
  double scale() const { return scale_; }

 private:
  std::vector<Component> comps_;
  std::vector<std::size_t> offset_;
  Eigen::MatrixXd m_;
  double scale_ = 0.0;
};

// Relative threshold for treating eigenvalues as zero.
inline constexpr double kPinvRelTol = 1e-10;

// Sigma_SS - Sigma_ST Sigma_TT^+ Sigma_TS for the given coordinates.
Eigen::MatrixXd conditional_block(const JointCovariance& cov, const std::vector<int>& s,
                                  const std::vector<int>& t);

// Law of X(S) given X(T), as a covariance over the components of S.
JointCovariance schur_conditional(const JointCovariance& cov, const VarList& s, const VarList& t);

// I(A;B|C) in bits. Returns +infinity when part of A is a deterministic
// linear function of (B, C) with nonzero conditional variance.
double gauss_mi(const JointCovariance& cov, const VarList& a, const VarList& b, const VarList& c = {});

// Total correlation among the listed components, in bits.
double gauss_total_correlation(const JointCovariance& cov, const VarList& omega);

// 1/2 log2 det(I + G K G^T).
double capacity_logdet(const Eigen::MatrixXd& g, const Eigen::MatrixXd& k);

// Memoized conditional log pseudo-determinants for repeated atom evaluation.
// Log-determinants are taken on cov + tau I with tau = kRegRelTol * scale,
// i.e. every coordinate observed through independent noise of variance tau.
// That is a genuine joint Gaussian, so values stay continuous and consistent
// across blocks (a hard rank cut applied block by block is not: the same
// near-null direction can fall on either side of it). A rank drop at the
// threshold is reported as +inf only when the regularized value is already
// above kDeterministicBits. Rank counts use the kPinvRelTol threshold.
inline constexpr double kRegRelTol = 1e-12;
inline constexpr double kDeterministicBits = 8.0;

class GaussianCache {
 public:
  explicit GaussianCache(const JointCovariance& cov);
  double mutual_info(std::uint64_t a, std::uint64_t b, std::uint64_t c);
  double total_correlation(const VarList& omega);
  double evaluate(const AtomSpec& atom, const std::map<std::string, double>& constants = {});

 private:
  struct Entry {
    double logdet;  // natural log of det of the regularized block
    int rank;       // eigenvalues above rank_tol_

  };
  const Entry& conditional(std::uint64_t s, std::uint64_t c);
  struct Hash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
      return std::hash<std::uint64_t>()(k.first * 0x9E3779B97F4A7C15ULL ^ k.second);
    }
  };
  const JointCovariance& cov_;
  Eigen::MatrixXd reg_;
  double tau_;
  double rank_tol_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Entry, Hash> cache_;
};

// Values mutual-information, total-correlation and constant atoms on a
// Gaussian law. Entropy atoms are rejected (differential entropy is not an
// atom of any region here).
AtomValuation gaussian_atom_valuation(const JointCovariance& cov, const std::vector<std::string>& atom_names,
                                      const std::map<std::string, double>& constants = {});

// N base stations, L users. G is L x N (Y = G X + Z with unit noise), P is the
// per-BS power, C[k] the fronthaul capacity of BS k and Ccoop(k, j) the
// capacity of the cooperation link from BS j to BS k.
struct CranNetwork {
  Eigen::MatrixXd G;
  double P = 0.0;
  Eigen::VectorXd C;
  Eigen::MatrixXd Ccoop;

  std::size_t N() const { return static_cast<std::size_t>(G.cols()); }
  std::size_t L() const { return static_cast<std::size_t>(G.rows()); }
  void validate() const;
  // Symmetric 2-BS 2-user instance: G = [[1, g12], [g21, 1]], C1 = C2 = C,
  // C12 = C21 = T.
  static CranNetwork symmetric(double P, double g12, double g21, double C, double T);
};

CranNetwork network_from_json(const std::string& text);
std::string network_to_json(const CranNetwork& net);

}  // namespace cranrate
