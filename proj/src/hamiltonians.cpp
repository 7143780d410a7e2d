#include "fkmc/hamiltonians.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace fkmc {

OracleSemigroup::OracleSemigroup(MatrixXc h, double hermiticity_tol) : h_(std::move(h)) {
  const double defect = (h_ - h_.adjoint()).cwiseAbs().maxCoeff();
  hermitian_ = defect <= hermiticity_tol * (1.0 + h_.cwiseAbs().maxCoeff());
  if (hermitian_) {
    eig_.emplace(h_);
    if (eig_->info() != Eigen::Success)
      throw NumericalError("oracle semigroup: eigendecomposition failed");
  }
}

MatrixXc OracleSemigroup::at(double t) const {
  if (t == 0.0) return MatrixXc::Identity(h_.rows(), h_.cols());
  if (hermitian_) {
    VectorXr ev = eig_->eigenvalues();
    VectorXc expev(ev.size());
    for (int i = 0; i < ev.size(); ++i) expev[i] = std::exp(-t * ev[i]);
    return eig_->eigenvectors() * expev.asDiagonal() * eig_->eigenvectors().adjoint();
  }
  MatrixXc a = -t * h_;
  return a.exp();
}

double OracleSemigroup::ground_energy() const {
  if (!hermitian_) throw InputError("ground_energy: Hamiltonian is not hermitian");
  return eig_->eigenvalues().minCoeff();
}

MatrixXc exact_semigroup(const GeneratorSet& gens, double t) {
  return OracleSemigroup(gens.h_full).at(t);
}

double van_hove_energy(const ModeSpace& modes, const VectorXc& f) {
  const double n = weighted_norm(modes, f, VectorXr(modes.omega().cwiseInverse()));
  return -n * n;
}

double truncated_van_hove_energy(const TruncatedFock& fock, const VectorXc& f) {
  MatrixXc h = d_gamma(fock, fock.modes().omega()) + field(fock, f);
  Eigen::SelfAdjointEigenSolver<MatrixXc> eig(h);
  return eig.eigenvalues().minCoeff();
}

MatrixXc domain_weight(const TruncatedFock& fock, DomainWeight flavor, double a,
                       const VectorXr& xi) {
  const ModeSpace& modes = fock.modes();
  const int nu = modes.space_dim();
  const int d = fock.dim();
  MatrixXc out = MatrixXc::Zero(d, d);
  VectorXr xi_eff = xi.size() == nu ? xi : VectorXr::Zero(nu);
  for (int s = 0; s < d; ++s) {
    const auto& occ = fock.occupation(s);
    double total_omega = 0.0;
    double quad = 0.0;
    for (int ell = 0; ell < nu; ++ell) {
      double p = 0.0;
      for (int k = 0; k < modes.mode_count(); ++k) p += occ[k] * modes.momentum()(k, ell);
      if (flavor == DomainWeight::M) {
        quad += 0.5 * p * p;
      } else {
        const double v = xi_eff[ell] - p;
        quad += 0.5 * v * v;
      }
    }
    for (int k = 0; k < modes.mode_count(); ++k) total_omega += occ[k] * modes.omega()[k];
    const double scale = (flavor == DomainWeight::M) ? 1.0 : a;
    out(s, s) = quad + scale * total_omega;
  }
  return out;
}

}  // namespace fkmc
