#pragma once

#include <optional>

#include "fkmc/spin_sde.hpp"

namespace fkmc {

/// Exact finite-dimensional semigroup e^{-tH} on C^L tensor (truncated Fock).
/// Hermitian H uses a cached eigendecomposition, general H scaling-and-squaring.
class OracleSemigroup {
 public:
  explicit OracleSemigroup(MatrixXc h, double hermiticity_tol = 1e-12);

  bool hermitian() const { return hermitian_; }
  const MatrixXc& hamiltonian() const { return h_; }
  MatrixXc at(double t) const;
  /// Ground-state energy (hermitian case only).
  double ground_energy() const;

 private:
  MatrixXc h_;
  bool hermitian_;
  std::optional<Eigen::SelfAdjointEigenSolver<MatrixXc>> eig_;
};

MatrixXc exact_semigroup(const GeneratorSet& gens, double t);

/// Exact infimum of dGamma(omega) + phi(f): the displaced-vacuum energy
/// -||omega^{-1/2} f||^2.
double van_hove_energy(const ModeSpace& modes, const VectorXc& f);

/// Ground energy of the truncated dGamma(omega) + phi(f) (converges to the
/// van Hove value from above as the truncation grows).
double truncated_van_hove_energy(const TruncatedFock& fock, const VectorXc& f);

enum class DomainWeight { M, Ma };

/// Diagnostic diagonal weights: M = (1/2) sum_l dGamma(m_l)^2 + dGamma(omega),
/// M_a(xi) = (1/2)(xi - dGamma(m))^2 + a dGamma(omega) (on the Fock factor).
MatrixXc domain_weight(const TruncatedFock& fock, DomainWeight flavor, double a = 1.0,
                       const VectorXr& xi = VectorXr());

}  // namespace fkmc
