#include "fkmc/fock.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "json.hpp"

namespace fkmc {

namespace {

std::string pack_key(const std::vector<int>& occ) {
  std::string key(occ.size(), '\0');
  for (size_t i = 0; i < occ.size(); ++i) key[i] = static_cast<char>(occ[i]);
  return key;
}

void enumerate_sector(int mode, int remaining, std::vector<int>& occ,
                      std::vector<std::vector<int>>& out) {
  if (mode == static_cast<int>(occ.size()) - 1) {
    occ[mode] = remaining;
    out.push_back(occ);
    return;
  }
  for (int n = 0; n <= remaining; ++n) {
    occ[mode] = n;
    enumerate_sector(mode + 1, remaining - n, occ, out);
  }
}

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TruncatedFock::TruncatedFock(std::shared_ptr<const ModeSpace> modes, int max_bosons)
    : modes_(std::move(modes)), max_bosons_(max_bosons) {
  if (max_bosons_ < 0) throw ConfigError("fock: max_bosons must be nonnegative");
  const int m = modes_->mode_count();
  const long dim = binomial(m + max_bosons_, max_bosons_);
  if (dim > kDimCap)
    throw ConfigError("fock: dimension " + std::to_string(dim) + " exceeds cap " +
                      std::to_string(kDimCap));
  // Make sure the conjugation is an isometry of the weighted space.
  for (int k = 0; k < m; ++k)
    if (std::abs(modes_->mu()[modes_->conjugation().perm[k]] - modes_->mu()[k]) > 1e-14)
      throw ConfigError("fock: mu must be invariant under the conjugation permutation");
  basis_.reserve(dim);
  std::vector<int> occ(m, 0);
  for (int total = 0; total <= max_bosons_; ++total)
    enumerate_sector(0, total, occ, basis_);
  totals_.resize(basis_.size());
  for (size_t i = 0; i < basis_.size(); ++i) {
    totals_[i] = 0;
    for (int nk : basis_[i]) totals_[i] += nk;
    index_[pack_key(basis_[i])] = static_cast<int>(i);
  }
}

int TruncatedFock::index_of(const std::vector<int>& occupation) const {
  auto it = index_.find(pack_key(occupation));
  return it == index_.end() ? -1 : it->second;
}

MatrixXc creation(const TruncatedFock& fock, const VectorXc& f) {
  if (f.size() != fock.modes().mode_count())
    throw InputError("creation: vector length must equal the mode count");
  const VectorXr& mu = fock.modes().mu();
  MatrixXc a = MatrixXc::Zero(fock.dim(), fock.dim());
  std::vector<int> occ;
  for (int s = 0; s < fock.dim(); ++s) {
    if (fock.total_occupation(s) == fock.max_bosons()) continue;
    occ = fock.occupation(s);
    for (int k = 0; k < f.size(); ++k) {
      if (f[k] == 0.0) continue;
      occ[k] += 1;
      const int t = fock.index_of(occ);
      a(t, s) += std::sqrt(occ[k] * mu[k]) * f[k];
      occ[k] -= 1;
    }
  }
  return a;
}

MatrixXc annihilation(const TruncatedFock& fock, const VectorXc& f) {
  return creation(fock, f).adjoint();
}

MatrixXc field(const TruncatedFock& fock, const VectorXc& f) {
  MatrixXc a = creation(fock, f);
  return a + a.adjoint();
}

MatrixXc d_gamma(const TruncatedFock& fock, const VectorXc& kappa) {
  if (kappa.size() != fock.modes().mode_count())
    throw InputError("d_gamma: weight length must equal the mode count");
  MatrixXc d = MatrixXc::Zero(fock.dim(), fock.dim());
  for (int s = 0; s < fock.dim(); ++s) {
    Complex ev = 0.0;
    const auto& occ = fock.occupation(s);
    for (int k = 0; k < kappa.size(); ++k) ev += double(occ[k]) * kappa[k];
    d(s, s) = ev;
  }
  return d;
}

MatrixXc d_gamma(const TruncatedFock& fock, const VectorXr& kappa) {
  return d_gamma(fock, VectorXc(kappa.cast<Complex>()));
}

VectorXc gamma_contraction_diagonal(const TruncatedFock& fock, const VectorXc& j) {
  if (j.size() != fock.modes().mode_count())
    throw InputError("gamma_contraction: weight length must equal the mode count");
  for (int k = 0; k < j.size(); ++k)
    if (std::abs(j[k]) > 1.0 + 1e-12)
      throw InputError("gamma_contraction: |j_k| <= 1 required");
  VectorXc diag(fock.dim());
  for (int s = 0; s < fock.dim(); ++s) {
    Complex v = 1.0;
    const auto& occ = fock.occupation(s);
    for (int k = 0; k < j.size(); ++k)
      for (int rep = 0; rep < occ[k]; ++rep) v *= j[k];
    diag[s] = v;
  }
  return diag;
}

MatrixXc gamma_contraction(const TruncatedFock& fock, const VectorXc& j) {
  return gamma_contraction_diagonal(fock, j).asDiagonal();
}

std::pair<VectorXc, double> exp_vector(const TruncatedFock& fock, const VectorXc& h) {
  if (h.size() != fock.modes().mode_count())
    throw InputError("exp_vector: vector length must equal the mode count");
  // Amplitude on |n> = prod_k (i h_k sqrt(mu_k))^{n_k} / sqrt(n_k!).
  VectorXc weighted =
      (fock.modes().mu().array().sqrt().cast<Complex>() * h.array()) * kI;
  VectorXc v(fock.dim());
  for (int s = 0; s < fock.dim(); ++s) {
    Complex amp = 1.0;
    const auto& occ = fock.occupation(s);
    for (int k = 0; k < h.size(); ++k)
      for (int rep = 1; rep <= occ[k]; ++rep) amp *= weighted[k] / std::sqrt(double(rep));
    v[s] = amp;
  }
  const double nrm = fkmc::norm(fock.modes(), h);
  const double h2 = nrm * nrm;
  // tail^2 = sum_{n > N} h2^n / n!  (term recursion; stop when negligible)
  double tail2 = 0.0;
  double term = 1.0;
  for (int n = 1; n <= fock.max_bosons(); ++n) term *= h2 / n;
  const int n_max = fock.max_bosons() + 400 + static_cast<int>(4.0 * h2);
  for (int n = fock.max_bosons() + 1; n < n_max; ++n) {
    term *= h2 / n;
    tail2 += term;
    if (term < 1e-300 || (n > 2 * h2 && term < 1e-18 * tail2)) break;
  }
  return {v, std::sqrt(tail2)};
}

MatrixXc weyl(const TruncatedFock& fock, const VectorXc& f) {
  MatrixXc phi = field(fock, f);
  return (kI * phi).exp();
}

MatrixXc normal_ordered_dressing(const TruncatedFock& fock, Complex u, const VectorXc& a_plus,
                                 const VectorXc& contraction, const VectorXc& a_minus) {
  VectorXc gamma = gamma_contraction_diagonal(fock, contraction);
  // exp{i a†(p)} and exp{i a(m)} terminate after N applications.
  MatrixXc ad = kI * creation(fock, a_plus);
  MatrixXc an = kI * annihilation(fock, a_minus);
  MatrixXc expo_plus = MatrixXc::Identity(fock.dim(), fock.dim());
  MatrixXc expo_minus = expo_plus;
  MatrixXc term_p = expo_plus, term_m = expo_minus;
  for (int l = 1; l <= fock.max_bosons(); ++l) {
    term_p = (ad * term_p) / double(l);
    term_m = (an * term_m) / double(l);
    expo_plus += term_p;
    expo_minus += term_m;
  }
  return std::exp(-u) * expo_plus * gamma.asDiagonal() * expo_minus;
}

MatrixXc sector_projector(const TruncatedFock& fock, int max_total) {
  MatrixXc p = MatrixXc::Zero(fock.dim(), fock.dim());
  for (int s = 0; s < fock.dim(); ++s)
    if (fock.total_occupation(s) <= max_total) p(s, s) = 1.0;
  return p;
}

VectorXc fock_conjugation(const TruncatedFock& fock, const VectorXc& psi) {
  if (psi.size() != fock.dim()) throw InputError("fock_conjugation: dimension mismatch");
  const auto& conj = fock.modes().conjugation();
  VectorXc out = VectorXc::Zero(fock.dim());
  std::vector<int> target(fock.modes().mode_count());
  for (int s = 0; s < fock.dim(); ++s) {
    const auto& occ = fock.occupation(s);
    Complex factor = 1.0;
    for (int j = 0; j < static_cast<int>(target.size()); ++j) {
      target[j] = occ[conj.perm[j]];
      for (int rep = 0; rep < occ[j]; ++rep) factor *= -conj.phase[conj.perm[j]];
    }
    out[fock.index_of(target)] = factor * std::conj(psi[s]);
  }
  return out;
}

namespace {

nlohmann::json basis_descriptor(const TruncatedFock& fock) {
  return {{"modes", fock.modes().mode_count()},
          {"max_bosons", fock.max_bosons()},
          {"ordering", "graded-lex"},
          {"dim", fock.dim()}};
}

void check_descriptor(const TruncatedFock& fock, const nlohmann::json& j) {
  if (j.at("modes") != fock.modes().mode_count() ||
      j.at("max_bosons") != fock.max_bosons() || j.at("dim") != fock.dim())
    throw InputError("fock json: basis descriptor does not match this space");
}

}  // namespace

std::string operator_to_json(const TruncatedFock& fock, const MatrixXc& op) {
  nlohmann::json entries = nlohmann::json::array();
  for (int r = 0; r < op.rows(); ++r)
    for (int c = 0; c < op.cols(); ++c)
      entries.push_back({op(r, c).real(), op(r, c).imag()});
  nlohmann::json j = {{"basis", basis_descriptor(fock)}, {"entries", entries}};
  return j.dump();
}

std::string vector_to_json(const TruncatedFock& fock, const VectorXc& v) {
  nlohmann::json entries = nlohmann::json::array();
  for (int r = 0; r < v.size(); ++r) entries.push_back({v[r].real(), v[r].imag()});
  nlohmann::json j = {{"basis", basis_descriptor(fock)}, {"entries", entries}};
  return j.dump();
}

MatrixXc operator_from_json(const TruncatedFock& fock, const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  check_descriptor(fock, j.at("basis"));
  const auto& entries = j.at("entries");
  if (static_cast<int>(entries.size()) != fock.dim() * fock.dim())
    throw InputError("fock json: wrong entry count");
  MatrixXc op(fock.dim(), fock.dim());
  int i = 0;
  for (int r = 0; r < fock.dim(); ++r)
    for (int c = 0; c < fock.dim(); ++c, ++i)
      op(r, c) = Complex(entries[i][0].get<double>(), entries[i][1].get<double>());
  return op;
}

VectorXc vector_from_json(const TruncatedFock& fock, const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  check_descriptor(fock, j.at("basis"));
  const auto& entries = j.at("entries");
  if (static_cast<int>(entries.size()) != fock.dim())
    throw InputError("fock json: wrong entry count");
  VectorXc v(fock.dim());
  for (int r = 0; r < fock.dim(); ++r)
    v[r] = Complex(entries[r][0].get<double>(), entries[r][1].get<double>());
  return v;
}

}  // namespace fkmc
