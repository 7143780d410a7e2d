#include "fkmc/mode_space.hpp"

#include <cmath>

namespace fkmc {

Conjugation Conjugation::identity(int mode_count) {
  Conjugation c;
  c.perm.resize(mode_count);
  for (int k = 0; k < mode_count; ++k) c.perm[k] = k;
  c.phase = VectorXc::Ones(mode_count);
  return c;
}

ModeSpace::ModeSpace(VectorXr mu, VectorXr omega, MatrixXr momentum, Conjugation conj)
    : mu_(std::move(mu)), omega_(std::move(omega)), momentum_(std::move(momentum)),
      conj_(std::move(conj)) {}

std::shared_ptr<const ModeSpace> ModeSpace::make(VectorXr mu, VectorXr omega,
                                                 MatrixXr momentum, Conjugation conj) {
  const int m = static_cast<int>(mu.size());
  if (omega.size() != m || momentum.rows() != m)
    throw ConfigError("mode space: mu, omega, momentum must have one row per mode");
  if (static_cast<int>(conj.perm.size()) != m || conj.phase.size() != m)
    throw ConfigError("mode space: conjugation data must cover all modes");
  for (int k = 0; k < m; ++k) {
    if (!(mu[k] > 0.0)) throw ConfigError("mode space: mu must be strictly positive");
    if (!(omega[k] > 0.0)) throw ConfigError("mode space: omega must be strictly positive");
  }
  for (int k = 0; k < m; ++k) {
    const int p = conj.perm[k];
    if (p < 0 || p >= m || conj.perm[p] != k)
      throw ConfigError("mode space: conjugation permutation must be an involution");
    if (std::abs(omega[p] - omega[k]) > 1e-14 * (1.0 + std::abs(omega[k])))
      throw ConfigError("mode space: omega must be invariant under the conjugation");
    if ((momentum.row(p) + momentum.row(k)).norm() > 1e-14 * (1.0 + momentum.row(k).norm()))
      throw ConfigError("mode space: momentum must flip sign under the conjugation");
    if (std::abs(std::abs(conj.phase[k]) - 1.0) > 1e-14)
      throw ConfigError("mode space: conjugation phases must be unimodular");
    if (std::abs(conj.phase[k] * std::conj(conj.phase[p]) - 1.0) > 1e-14)
      throw ConfigError("mode space: conjugation must square to the identity");
  }
  return std::shared_ptr<const ModeSpace>(new ModeSpace(
      std::move(mu), std::move(omega), std::move(momentum), std::move(conj)));
}

Complex inner_product(const ModeSpace& modes, const VectorXc& f, const VectorXc& g) {
  if (f.size() != modes.mode_count() || g.size() != modes.mode_count())
    throw InputError("inner_product: vector length must equal the mode count");
  return (modes.mu().cast<Complex>().array() * f.conjugate().array() * g.array()).sum();
}

double weighted_norm(const ModeSpace& modes, const VectorXc& f, const VectorXr& kappa) {
  if (f.size() != modes.mode_count() || kappa.size() != modes.mode_count())
    throw InputError("weighted_norm: vector length must equal the mode count");
  return std::sqrt((modes.mu().array() * kappa.array() * f.array().abs2()).sum());
}

VectorXc apply_conjugation(const ModeSpace& modes, const VectorXc& f) {
  const auto& c = modes.conjugation();
  VectorXc out(f.size());
  for (int k = 0; k < f.size(); ++k) out[k] = c.phase[k] * std::conj(f[c.perm[k]]);
  return out;
}

CouplingFamily::CouplingFamily(std::shared_ptr<const ModeSpace> modes, int spin_dim,
                               std::vector<MatrixXc> spin_matrices, FieldMap G, FieldMap F,
                               std::function<VectorXc(const VectorXr&)> q, bool x_independent)
    : modes_(std::move(modes)), spin_dim_(spin_dim), spin_matrices_(std::move(spin_matrices)),
      G_(std::move(G)), F_(std::move(F)), q_(std::move(q)), x_independent_(x_independent) {
  for (const auto& s : spin_matrices_) {
    if (s.rows() != spin_dim_ || s.cols() != spin_dim_)
      throw ConfigError("coupling: spin matrices must be L x L");
    if ((s - s.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw ConfigError("coupling: spin matrices must be hermitian");
    if (s.operatorNorm() > 1.0 + 1e-12)
      throw ConfigError("coupling: spin matrices must have operator norm <= 1");
  }
}

CouplingSnapshot CouplingFamily::at(const VectorXr& x) const {
  if (x.size() != modes_->space_dim())
    throw InputError("coupling: position dimension mismatch");
  CouplingSnapshot s;
  s.G = G_(x);
  s.F = F_(x);
  s.q = q_(x);
  // q_breve = q/2 - (i/2) m·G with (m·G)_k = sum_l m_{k,l} G_{k,l}
  VectorXc m_dot_G = (modes_->momentum().cast<Complex>().array() * s.G.array()).rowwise().sum();
  s.q_breve = 0.5 * s.q - 0.5 * kI * m_dot_G;
  return s;
}

double CouplingFamily::c_fixedness_defect(const VectorXr& x) const {
  CouplingSnapshot s = at(x);
  double defect = 0.0;
  for (int l = 0; l < s.G.cols(); ++l)
    defect = std::max(defect,
                      (apply_conjugation(*modes_, s.G.col(l)) - s.G.col(l)).cwiseAbs().maxCoeff());
  for (int j = 0; j < s.F.cols(); ++j)
    defect = std::max(defect,
                      (apply_conjugation(*modes_, s.F.col(j)) - s.F.col(j)).cwiseAbs().maxCoeff());
  defect = std::max(defect, (apply_conjugation(*modes_, s.q) - s.q).cwiseAbs().maxCoeff());
  defect = std::max(defect,
                    (apply_conjugation(*modes_, s.q_breve) - s.q_breve).cwiseAbs().maxCoeff());
  return defect;
}

CouplingFamily nelson_preset(std::shared_ptr<const ModeSpace> modes, const VectorXc& form_factor,
                             bool translation_covariant) {
  if (form_factor.size() != modes->mode_count())
    throw ConfigError("nelson preset: form factor length must equal the mode count");
  if ((apply_conjugation(*modes, form_factor) - form_factor).cwiseAbs().maxCoeff() > 1e-12)
    throw ConfigError("nelson preset: form factor must be fixed by the conjugation");
  const int m = modes->mode_count();
  const int nu = modes->space_dim();
  std::vector<MatrixXc> sigma{-MatrixXc::Identity(1, 1)};
  auto zero_G = [m, nu](const VectorXr&) { return MatrixXc::Zero(m, nu).eval(); };
  auto zero_q = [m](const VectorXr&) { return VectorXc::Zero(m).eval(); };
  CouplingFamily::FieldMap F;
  if (translation_covariant) {
    F = [modes, form_factor](const VectorXr& x) {
      VectorXr phase = modes->momentum_dot(x);
      MatrixXc out(form_factor.size(), 1);
      out.col(0) = (phase.array().cast<Complex>() * Complex(0, -1)).exp() * form_factor.array();
      return out;
    };
  } else {
    F = [form_factor](const VectorXr&) {
      MatrixXc out(form_factor.size(), 1);
      out.col(0) = form_factor;
      return out;
    };
  }
  return CouplingFamily(modes, 1, std::move(sigma), std::move(zero_G), std::move(F),
                        std::move(zero_q), !translation_covariant);
}

std::pair<std::shared_ptr<const ModeSpace>, CouplingFamily> nrqed_preset(
    double cutoff, const std::vector<NrqedGridPoint>& k_grid, double alpha) {
  if (cutoff <= 0.0) throw ConfigError("nrqed preset: cutoff must be positive");
  if (alpha < 0.0) throw ConfigError("nrqed preset: alpha must be nonnegative");
  const int n_pts = static_cast<int>(k_grid.size());
  const Eigen::Vector3d e3(0.0, 0.0, 1.0);

  // Pair every grid point with its mirror image; reject asymmetric grids.
  std::vector<int> mirror(n_pts, -1);
  for (int i = 0; i < n_pts; ++i) {
    const Eigen::Vector3d& k = k_grid[i].k;
    if (k.norm() < 1e-12) throw ConfigError("nrqed preset: grid must avoid the origin");
    if (e3.cross(k).norm() < 1e-12 * k.norm())
      throw ConfigError("nrqed preset: grid must avoid the polarization axis");
    for (int j = 0; j < n_pts; ++j) {
      if ((k_grid[j].k + k).norm() < 1e-10 &&
          std::abs(k_grid[j].weight - k_grid[i].weight) < 1e-12) {
        mirror[i] = j;
        break;
      }
    }
    if (mirror[i] < 0)
      throw ConfigError("nrqed preset: grid must be symmetric under k -> -k");
  }

  // Modes are (grid point, polarization); index = 2*i + (j-1).
  const int m = 2 * n_pts;
  VectorXr mu(m), omega(m);
  MatrixXr momentum(m, 3);
  Conjugation conj;
  conj.perm.resize(m);
  conj.phase = VectorXc::Zero(m);
  MatrixXr eps1(n_pts, 3), eps2(n_pts, 3);
  for (int i = 0; i < n_pts; ++i) {
    const Eigen::Vector3d& k = k_grid[i].k;
    Eigen::Vector3d e1 = e3.cross(k).normalized();
    Eigen::Vector3d e2 = k.cross(e1) / k.norm();
    eps1.row(i) = e1;
    eps2.row(i) = e2;
    for (int j = 0; j < 2; ++j) {
      const int idx = 2 * i + j;
      mu[idx] = k_grid[i].weight;
      omega[idx] = k.norm();
      momentum.row(idx) = k;
      conj.perm[idx] = 2 * mirror[i] + j;
      conj.phase[idx] = (j == 0) ? -1.0 : 1.0;  // (-1)^j with j in {1,2}
    }
  }
  auto modes = ModeSpace::make(mu, omega, momentum, conj);

  const double amp = std::sqrt(alpha / 2.0) * std::pow(2.0 * M_PI, -1.5);
  // Per-mode polarization vector and scalar prefactor amp |k|^{-1/2} chi_Lambda.
  MatrixXr pol(m, 3);
  VectorXr pref(m);
  for (int i = 0; i < n_pts; ++i) {
    const double kn = k_grid[i].k.norm();
    const double chi = (kn <= cutoff) ? 1.0 : 0.0;
    pol.row(2 * i) = eps1.row(i);
    pol.row(2 * i + 1) = eps2.row(i);
    pref[2 * i] = pref[2 * i + 1] = amp * chi / std::sqrt(kn);
  }

  auto G = [modes, pol, pref](const VectorXr& x) {
    VectorXr mdotx = modes->momentum_dot(x);
    MatrixXc out(pol.rows(), 3);
    for (int k = 0; k < pol.rows(); ++k) {
      Complex phase = pref[k] * std::exp(Complex(0.0, -mdotx[k]));
      for (int l = 0; l < 3; ++l) out(k, l) = phase * pol(k, l);
    }
    return out;
  };
  auto F = [modes, G](const VectorXr& x) {
    MatrixXc g = G(x);
    MatrixXc out(g.rows(), 3);
    for (int k = 0; k < g.rows(); ++k) {
      Eigen::Vector3d kk = modes->momentum().row(k);
      Eigen::Vector3cd gk = g.row(k);
      Eigen::Vector3cd cr = kk.cast<Complex>().cross(gk);
      out.row(k) = -0.5 * kI * cr.transpose();
    }
    return out;
  };
  // div_x G = -i (k·G): zero in Coulomb gauge, kept numerical as a sanity probe.
  auto q = [modes, G](const VectorXr& x) {
    MatrixXc g = G(x);
    VectorXc out =
        (modes->momentum().cast<Complex>().array() * g.array()).rowwise().sum();
    return VectorXc(-kI * out);
  };

  std::vector<MatrixXc> sigma(3, MatrixXc(2, 2));
  sigma[0] << 0, 1, 1, 0;
  sigma[1] << 0, Complex(0, -1), Complex(0, 1), 0;
  sigma[2] << 1, 0, 0, -1;

  CouplingFamily coupling(modes, 2, std::move(sigma), std::move(G), std::move(F),
                          std::move(q), false);
  return {modes, std::move(coupling)};
}

}  // namespace fkmc
