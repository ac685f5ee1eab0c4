#include "cranrate/gaussian_info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace cranrate {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double sym_scale(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

void check_psd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + " is not square");
  if (m.size() == 0) return;
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + " has non-finite entries");
  double mag = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * mag)
    throw std::invalid_argument(std::string(what) + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9 * mag)
    throw std::invalid_argument(std::string(what) + " is not positive semidefinite");
}

Eigen::MatrixXd pinv_sym(const Eigen::MatrixXd& m, double abs_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd inv = es.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = inv(i) > abs_tol ? 1.0 / inv(i) : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

JointCovariance::JointCovariance(std::vector<Component> components, Eigen::MatrixXd matrix)
    : comps_(std::move(components)), m_(std::move(matrix)) {
  if (comps_.size() > 64) throw std::invalid_argument("at most 64 components are supported");
  std::set<std::string> seen;
  std::size_t total = 0;
  for (const auto& c : comps_) {
    if (c.name.empty() || !seen.insert(c.name).second)
      throw std::invalid_argument("empty or duplicate component name '" + c.name + "'");
    if (c.dim == 0) throw std::invalid_argument("component " + c.name + " has dimension 0");
    offset_.push_back(total);
    total += c.dim;
  }
  if (static_cast<std::size_t>(m_.rows()) != total || static_cast<std::size_t>(m_.cols()) != total)
    throw std::invalid_argument("covariance size does not match component dimensions");
  check_psd(m_, "covariance");
  m_ = 0.5 * (m_ + m_.transpose());
  scale_ = sym_scale(m_);
}

bool JointCovariance::has(const std::string& name) const {
  return std::any_of(comps_.begin(), comps_.end(), [&](const Component& c) { return c.name == name; });
}

std::size_t JointCovariance::component_index(const std::string& name) const {
  for (std::size_t i = 0; i < comps_.size(); ++i)
    if (comps_[i].name == name) return i;
  throw std::out_of_range("unknown component " + name);
}

std::vector<int> JointCovariance::coordinates(const VarList& names) const {
  std::vector<int> out;
  for (const auto& n : names) {
    std::size_t i = component_index(n);
    for (std::size_t d = 0; d < comps_[i].dim; ++d) out.push_back(static_cast<int>(offset_[i] + d));
  }
  return out;
}

std::uint64_t JointCovariance::mask_of(const VarList& names) const {
  std::uint64_t m = 0;
  for (const auto& n : names) m |= std::uint64_t{1} << component_index(n);
  return m;
}

std::vector<int> JointCovariance::coordinates(std::uint64_t mask) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < comps_.size(); ++i)
    if (mask >> i & 1)
      for (std::size_t d = 0; d < comps_[i].dim; ++d) out.push_back(static_cast<int>(offset_[i] + d));
  return out;
}

Eigen::MatrixXd JointCovariance::block(const std::vector<int>& rows, const std::vector<int>& cols) const {
  Eigen::MatrixXd b(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) b(i, j) = m_(rows[i], cols[j]);
  return b;
}

Eigen::MatrixXd conditional_block(const JointCovariance& cov, const std::vector<int>& s, const std::vector<int>& t) {
  Eigen::MatrixXd sss = cov.block(s, s);
  if (t.empty()) return sss;
  Eigen::MatrixXd sst = cov.block(s, t);
  Eigen::MatrixXd stt = cov.block(t, t);
  Eigen::MatrixXd out = sss - sst * pinv_sym(stt, kPinvRelTol * cov.scale()) * sst.transpose();
  return 0.5 * (out + out.transpose());
}

JointCovariance schur_conditional(const JointCovariance& cov, const VarList& s, const VarList& t) {
  std::set<std::string> ss(s.begin(), s.end());
  for (const auto& n : t)
    if (ss.count(n)) throw std::invalid_argument("conditioning set overlaps target set at " + n);
  std::vector<Component> comps;
  for (const auto& n : s) comps.push_back(cov.components()[cov.component_index(n)]);
  Eigen::MatrixXd m = conditional_block(cov, cov.coordinates(s), cov.coordinates(t));
  // clip tiny negative eigenvalues left by cancellation
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return JointCovariance(std::move(comps), 0.5 * (m + m.transpose()));
}

// ---------------------------------------------------------------------------

GaussianCache::GaussianCache(const JointCovariance& cov)
    : cov_(cov),
      tau_(std::max(kRegRelTol * cov.scale(), std::numeric_limits<double>::min())),
      rank_tol_(kPinvRelTol * cov.scale()) {
  const Eigen::Index n = cov.matrix().rows();
  reg_ = cov.matrix() + tau_ * Eigen::MatrixXd::Identity(n, n);
}

const GaussianCache::Entry& GaussianCache::conditional(std::uint64_t s, std::uint64_t c) {
  auto key = std::make_pair(s, c);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Entry e{0.0, 0};
  if (s != 0) {
    const std::vector<int> si = cov_.coordinates(s), ti = cov_.coordinates(c);
    auto block = [&](const std::vector<int>& r, const std::vector<int>& k) {
      Eigen::MatrixXd b(r.size(), k.size());
      for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < k.size(); ++j) b(i, j) = reg_(r[i], k[j]);
      return b;
    };
    Eigen::MatrixXd m = block(si, si);
    if (!ti.empty()) {
      // regularized T block is positive definite: plain solve, no pseudo-inverse
      Eigen::MatrixXd st = block(si, ti);
      m -= st * block(ti, ti).ldlt().solve(st.transpose());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      double lam = es.eigenvalues()(i);
      e.logdet += std::log(std::max(lam, tau_));
      if (lam > rank_tol_ + tau_) ++e.rank;
    }
  }
  return cache_.emplace(key, e).first->second;
}

double GaussianCache::mutual_info(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  if ((a & b) || (a & c) || (b & c)) throw std::invalid_argument("mutual information sets overlap");
  if (a == 0 || b == 0) return 0.0;
  const Entry ea = conditional(a, c);
  const Entry eb = conditional(b, c);
  const Entry eab = conditional(a | b, c);
  const double v = std::max(0.0, 0.5 * (ea.logdet + eb.logdet - eab.logdet) / kLn2);
  if (eab.rank < ea.rank + eb.rank && v > kDeterministicBits) return std::numeric_limits<double>::infinity();
  return v;
}

double GaussianCache::total_correlation(const VarList& omega) {
  double sum = 0.0;
  int rank = 0;
  std::uint64_t all = 0;
  for (const auto& n : omega) {
    std::uint64_t m = cov_.mask_of({n});
    if (all & m) throw std::invalid_argument("repeated component in total correlation");
    all |= m;
    const Entry e = conditional(m, 0);
    sum += e.logdet;
    rank += e.rank;
  }
  const Entry joint = conditional(all, 0);
  const double v = std::max(0.0, 0.5 * (sum - joint.logdet) / kLn2);
  if (joint.rank < rank && v > kDeterministicBits) return std::numeric_limits<double>::infinity();
  return v;
}

double GaussianCache::evaluate(const AtomSpec& atom, const std::map<std::string, double>& constants) {
  switch (atom.kind) {
    case AtomKind::Constant: {
      auto it = constants.find(atom.name);
      if (it == constants.end()) throw std::out_of_range("no value for constant " + atom.name);
      return it->second;
    }
    case AtomKind::MutualInfo:
      return mutual_info(cov_.mask_of(atom.sets[0]), cov_.mask_of(atom.sets[1]), cov_.mask_of(atom.sets[2]));
    case AtomKind::TotalCorrelation:
      return total_correlation(atom.sets[0]);
    case AtomKind::Entropy:
      throw std::invalid_argument("entropy atoms are not defined for Gaussian laws: " + canonical_name(atom));
  }
  throw std::invalid_argument("unknown atom kind");
}

double gauss_mi(const JointCovariance& cov, const VarList& a, const VarList& b, const VarList& c) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mutual information needs nonempty sets");
  GaussianCache cache(cov);
  return cache.mutual_info(cov.mask_of(a), cov.mask_of(b), cov.mask_of(c));
}

double gauss_total_correlation(const JointCovariance& cov, const VarList& omega) {
  if (omega.empty()) throw std::invalid_argument("total correlation of an empty set");
  GaussianCache cache(cov);
  return cache.total_correlation(omega);
}

double capacity_logdet(const Eigen::MatrixXd& g, const Eigen::MatrixXd& k) {
  if (g.cols() != k.rows()) throw std::invalid_argument("capacity_logdet: dimension mismatch");
  check_psd(k, "input covariance");
  if (g.rows() == 0 || g.cols() == 0) return 0.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(g.rows(), g.rows()) + g * k * g.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s += std::log2(std::max(es.eigenvalues()(i), 1.0));
  return 0.5 * s;
}

AtomValuation gaussian_atom_valuation(const JointCovariance& cov, const std::vector<std::string>& atom_names,
                                      const std::map<std::string, double>& constants) {
  GaussianCache cache(cov);
  AtomValuation out;
  for (const auto& n : atom_names) out[n] = cache.evaluate(parse_atom(n), constants);
  return out;
}

// ---------------------------------------------------------------------------

void CranNetwork::validate() const {
  if (G.rows() < 1 || G.cols() < 1) throw std::invalid_argument("G must be at least 1x1");
  if (!G.allFinite()) throw std::invalid_argument("G has non-finite entries");
  if (!(P >= 0.0) || !std::isfinite(P)) throw std::invalid_argument("P must be a finite nonnegative number");
  if (static_cast<std::size_t>(C.size()) != N()) throw std::invalid_argument("C must have one entry per BS");
  if (static_cast<std::size_t>(Ccoop.rows()) != N() || static_cast<std::size_t>(Ccoop.cols()) != N())
    throw std::invalid_argument("Ccoop must be N x N");
  for (Eigen::Index i = 0; i < C.size(); ++i)
    if (!(C(i) >= 0.0)) throw std::invalid_argument("fronthaul capacities must be >= 0");
  for (Eigen::Index i = 0; i < Ccoop.rows(); ++i)
    for (Eigen::Index j = 0; j < Ccoop.cols(); ++j) {
      if (!(Ccoop(i, j) >= 0.0)) throw std::invalid_argument("cooperation capacities must be >= 0");
      if (i == j && Ccoop(i, j) != 0.0) throw std::invalid_argument("Ccoop must have a zero diagonal");
    }
}

CranNetwork CranNetwork::symmetric(double P, double g12, double g21, double C, double T) {
  CranNetwork net;
  net.G.resize(2, 2);
  net.G << 1.0, g12, g21, 1.0;
  net.P = P;
  net.C = Eigen::Vector2d(C, C);
  net.Ccoop.resize(2, 2);
  net.Ccoop << 0.0, T, T, 0.0;
  net.validate();
  return net;
}

namespace {

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument(std::string(what) + " must be a nonempty array of rows");
  Eigen::MatrixXd m(j.size(), j.at(0).size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j.at(r).size() != static_cast<std::size_t>(m.cols()))
      throw std::invalid_argument(std::string(what) + " rows have different lengths");
    for (std::size_t c = 0; c < j.at(r).size(); ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

CranNetwork network_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  for (const char* key : {"G", "P", "C"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("network JSON is missing \"") + key + "\"");
  CranNetwork net;
  net.G = matrix_from_json(j.at("G"), "G");
  net.P = j.at("P").get<double>();
  auto c = j.at("C").get<std::vector<double>>();
  net.C = Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  if (j.contains("Ccoop"))
    net.Ccoop = matrix_from_json(j.at("Ccoop"), "Ccoop");
  else
    net.Ccoop = Eigen::MatrixXd::Zero(net.G.cols(), net.G.cols());
  net.validate();
  return net;
}

std::string network_to_json(const CranNetwork& net) {
  nlohmann::json j;
  j["G"] = matrix_to_json(net.G);
  j["P"] = net.P;
  j["C"] = std::vector<double>(net.C.data(), net.C.data() + net.C.size());
  j["Ccoop"] = matrix_to_json(net.Ccoop);
  return j.dump();
}

}  // namespace cranrate
