#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "fkmc/mode_space.hpp"

namespace fkmc {

/// Bosonic Fock space over a finite ModeSpace, truncated at total occupation N.
/// Basis: occupation multi-indices n with sum(n) <= N, ordered by total
/// occupation then lexicographically; dim = binomial(M+N, N).
class TruncatedFock {
 public:
  static constexpr long kDimCap = 5000;

  TruncatedFock(std::shared_ptr<const ModeSpace> modes, int max_bosons);

  const ModeSpace& modes() const { return *modes_; }
  std::shared_ptr<const ModeSpace> modes_ptr() const { return modes_; }
  int max_bosons() const { return max_bosons_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<int>& occupation(int index) const { return basis_[index]; }
  int total_occupation(int index) const { return totals_[index]; }
  /// Index of an occupation multi-index, or -1 if it exceeds the truncation.
  int index_of(const std::vector<int>& occupation) const;

 private:
  std::shared_ptr<const ModeSpace> modes_;
  int max_bosons_;
  std::vector<std::vector<int>> basis_;
  std::vector<int> totals_;
  std::unordered_map<std::string, int> index_;
};

/// a†(f): adds one boson; matrix element sqrt((n_k+1) mu_k) f_k. States at the
/// top sector map to zero.
MatrixXc creation(const TruncatedFock& fock, const VectorXc& f);

/// a(f) = creation(f)†; kills the vacuum.
MatrixXc annihilation(const TruncatedFock& fock, const VectorXc& f);

/// Segal field a†(f) + a(f).
MatrixXc field(const TruncatedFock& fock, const VectorXc& f);

/// dGamma(kappa): diagonal with eigenvalue sum_k n_k kappa_k.
MatrixXc d_gamma(const TruncatedFock& fock, const VectorXc& kappa);
MatrixXc d_gamma(const TruncatedFock& fock, const VectorXr& kappa);

/// Gamma(j) for |j_k| <= 1: diagonal with eigenvalue prod_k j_k^{n_k}.
MatrixXc gamma_contraction(const TruncatedFock& fock, const VectorXc& j);

/// Diagonal amplitudes of Gamma(j) (cheap form for repeated application).
VectorXc gamma_contraction_diagonal(const TruncatedFock& fock, const VectorXc& j);

/// Truncated exponential vector zeta(h) = (1, ih, ..., i^n h^{⊗n}/sqrt(n!), ...)
/// together with the Fock-norm of the dropped tail,
/// tail^2 = sum_{n>N} ||h||^{2n} / n!.
std::pair<VectorXc, double> exp_vector(const TruncatedFock& fock, const VectorXc& h);

/// Weyl operator e^{i phi(f)} by exact matrix exponential.
MatrixXc weyl(const TruncatedFock& fock, const VectorXc& f);

/// e^{-u} exp{i a†(a_plus)} Gamma(contraction) exp{i a(a_minus)}; both
/// exponentials are finite sums on the truncated space.
MatrixXc normal_ordered_dressing(const TruncatedFock& fock, Complex u, const VectorXc& a_plus,
                                 const VectorXc& contraction, const VectorXc& a_minus);

/// Orthogonal projection onto total occupation <= max_total (test helper).
MatrixXc sector_projector(const TruncatedFock& fock, int max_total);

/// Conjugation Gamma(-C) lifted to the truncated space, applied to a vector.
VectorXc fock_conjugation(const TruncatedFock& fock, const VectorXc& psi);

/// JSON serialization (basis descriptor + row-major [re, im] entries).
std::string operator_to_json(const TruncatedFock& fock, const MatrixXc& op);
std::string vector_to_json(const TruncatedFock& fock, const VectorXc& v);
MatrixXc operator_from_json(const TruncatedFock& fock, const std::string& text);
VectorXc vector_from_json(const TruncatedFock& fock, const std::string& text);

}  // namespace fkmc
