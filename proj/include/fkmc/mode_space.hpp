#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fkmc/common.hpp"

namespace fkmc {

/// Antilinear conjugation C on the mode space: (Cf)_k = phase_k * conj(f_{perm_k}).
/// perm is an involution and phase_k * conj(phase_{perm_k}) = 1, so C^2 = id.
struct Conjugation {
  std::vector<int> perm;
  VectorXc phase;

  static Conjugation identity(int mode_count);
};

/// Finite set of boson modes carrying the L^2(mu) structure: per-mode measure
/// weights mu_k > 0, dispersion omega_k > 0, momenta m(k) in R^nu, and the
/// conjugation C with omega∘perm = omega and m∘perm = -m.
class ModeSpace {
 public:
  static std::shared_ptr<const ModeSpace> make(VectorXr mu, VectorXr omega,
                                               MatrixXr momentum, Conjugation conj);

  int mode_count() const { return static_cast<int>(mu_.size()); }
  int space_dim() const { return static_cast<int>(momentum_.cols()); }
  const VectorXr& mu() const { return mu_; }
  const VectorXr& omega() const { return omega_; }
  /// mode_count x nu; row k is m(k).
  const MatrixXr& momentum() const { return momentum_; }
  const Conjugation& conjugation() const { return conj_; }

  /// m(.)·x as a per-mode vector.
  VectorXr momentum_dot(const VectorXr& x) const { return momentum_ * x; }

 private:
  ModeSpace(VectorXr mu, VectorXr omega, MatrixXr momentum, Conjugation conj);
  VectorXr mu_, omega_;
  MatrixXr momentum_;
  Conjugation conj_;
};

/// Weighted L^2(mu) pairing, conjugate-linear in the first argument.
Complex inner_product(const ModeSpace& modes, const VectorXc& f, const VectorXc& g);

/// || kappa^{1/2} f ||_mu for a per-mode nonnegative weight kappa.
double weighted_norm(const ModeSpace& modes, const VectorXc& f, const VectorXr& kappa);

inline double norm(const ModeSpace& modes, const VectorXc& f) {
  return weighted_norm(modes, f, VectorXr::Ones(f.size()));
}

VectorXc apply_conjugation(const ModeSpace& modes, const VectorXc& f);

/// Coupling data frozen at one particle position.
struct CouplingSnapshot {
  MatrixXc G;        // mode_count x nu, column l is G_l(x)
  MatrixXc F;        // mode_count x S
  VectorXc q;        // div_x G
  VectorXc q_breve;  // q/2 - (i/2) m·G
};

/// Position-dependent coupling family: G(x), F(x), divergence q(x) and the
/// derived q_breve(x), spin matrices sigma_j. All vectors are fixed by C.
class CouplingFamily {
 public:
  using FieldMap = std::function<MatrixXc(const VectorXr& x)>;

  CouplingFamily(std::shared_ptr<const ModeSpace> modes, int spin_dim,
                 std::vector<MatrixXc> spin_matrices, FieldMap G, FieldMap F,
                 std::function<VectorXc(const VectorXr&)> q, bool x_independent);

  const ModeSpace& modes() const { return *modes_; }
  std::shared_ptr<const ModeSpace> modes_ptr() const { return modes_; }
  int spin_dim() const { return spin_dim_; }                 // L
  int spin_channels() const { return static_cast<int>(spin_matrices_.size()); }  // S
  const std::vector<MatrixXc>& spin_matrices() const { return spin_matrices_; }
  bool x_independent() const { return x_independent_; }

  CouplingSnapshot at(const VectorXr& x) const;

  /// Checks CG=G, CF=F, Cq=q, Cq_breve=q_breve at a given position; returns the
  /// largest componentwise violation.
  double c_fixedness_defect(const VectorXr& x) const;

 private:
  std::shared_ptr<const ModeSpace> modes_;
  int spin_dim_;
  std::vector<MatrixXc> spin_matrices_;
  FieldMap G_, F_;
  std::function<VectorXc(const VectorXr&)> q_;
  bool x_independent_;
};

/// Nelson model: L = S = 1, sigma_1 = -1, G = 0; F_x = e^{-i m·x} f when
/// translation covariant, F_x = f otherwise. Requires Cf = f.
CouplingFamily nelson_preset(std::shared_ptr<const ModeSpace> modes, const VectorXc& form_factor,
                             bool translation_covariant);

struct NrqedGridPoint {
  Eigen::Vector3d k;
  double weight;
};

/// One-electron NRQED with sharp UV cutoff: two polarization modes per grid
/// point, omega(k)=|k|, m(k)=k, Pauli matrices, Coulomb-gauge G and F=-(i/2)k×G.
/// The grid must be symmetric under k -> -k, avoid the origin and the e3 axis.
std::pair<std::shared_ptr<const ModeSpace>, CouplingFamily> nrqed_preset(
    double cutoff, const std::vector<NrqedGridPoint>& k_grid, double alpha);

}  // namespace fkmc
