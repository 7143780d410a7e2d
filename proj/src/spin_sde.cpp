#include "fkmc/spin_sde.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace fkmc {

MatrixXc spin_kron(const MatrixXc& a, const MatrixXc& b) {
  MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

GeneratorSet build_generators(const CouplingFamily& coupling, const VectorXr& xi,
                              const VectorXr& x, std::shared_ptr<const TruncatedFock> fock,
                              double potential_value) {
  const ModeSpace& modes = coupling.modes();
  const int nu = modes.space_dim();
  const int l = coupling.spin_dim();
  const int d = fock->dim();
  if (static_cast<long>(l) * d > TruncatedFock::kDimCap)
    throw ConfigError("generators: spin_dim * fock dim exceeds the cap");
  CouplingSnapshot snap = coupling.at(x);

  GeneratorSet gs;
  gs.fock = fock;
  gs.spin_dim = l;
  gs.xi = xi;
  gs.x = x;
  gs.v_diagonal = snap.G.cwiseAbs().maxCoeff() == 0.0;

  gs.v.reserve(nu);
  MatrixXc sum_v2 = MatrixXc::Zero(d, d);
  for (int ell = 0; ell < nu; ++ell) {
    MatrixXc v = xi[ell] * MatrixXc::Identity(d, d) -
                 d_gamma(*fock, VectorXr(modes.momentum().col(ell)));
    if (!gs.v_diagonal) v -= field(*fock, snap.G.col(ell));
    sum_v2 += v * v;
    gs.v.push_back(std::move(v));
  }
  if (gs.v_diagonal) {
    gs.v_diag = MatrixXr(d, nu);
    for (int s = 0; s < d; ++s) {
      const auto& occ = fock->occupation(s);
      for (int ell = 0; ell < nu; ++ell) {
        double p = 0.0;
        for (int k = 0; k < modes.mode_count(); ++k) p += occ[k] * modes.momentum()(k, ell);
        gs.v_diag(s, ell) = xi[ell] - p;
      }
    }
  }

  MatrixXc core = d_gamma(*fock, modes.omega()) - 0.5 * kI * field(*fock, snap.q);
  gs.h_sc = 0.5 * sum_v2 + core + potential_value * MatrixXc::Identity(d, d);

  MatrixXc spin_field = MatrixXc::Zero(l * d, l * d);
  for (int j = 0; j < coupling.spin_channels(); ++j)
    spin_field += spin_kron(coupling.spin_matrices()[j], field(*fock, snap.F.col(j)));
  gs.h_full = spin_kron(MatrixXc::Identity(l, l), gs.h_sc) - spin_field;
  // r excludes the potential: H_full = (1/2) sum kron(I, v_l^2) + r + V.
  gs.r = spin_kron(MatrixXc::Identity(l, l), core) - spin_field;
  return gs;
}

double lambda_bound(const CouplingFamily& coupling, const VectorXr& x) {
  const ModeSpace& modes = coupling.modes();
  const int l = coupling.spin_dim();
  CouplingSnapshot snap = coupling.at(x);
  VectorXr inv_omega = modes.omega().cwiseInverse();
  MatrixXc a(l, l);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) {
      VectorXc entry = VectorXc::Zero(modes.mode_count());
      for (int s = 0; s < coupling.spin_channels(); ++s)
        entry += coupling.spin_matrices()[s](i, j) * snap.F.col(s);
      a(i, j) = weighted_norm(modes, entry, inv_omega);
    }
  }
  return a.operatorNorm();
}

namespace {

struct StepCache {
  const MatrixXc* r_ptr = nullptr;
  double dt = -1.0;
  MatrixXc exp_r;
};

/// Applies kron(I_L, op) to a block state (vector or matrix).
template <typename Rhs>
void apply_fock_blockwise(const MatrixXc& op, int spin_dim, Rhs& y) {
  const int d = static_cast<int>(op.rows());
  for (int s = 0; s < spin_dim; ++s)
    y.middleRows(s * d, d) = op * y.middleRows(s * d, d).eval();
}

/// One step of either scheme. Generator sets must be built with
/// potential_value = 0; the potential enters as the exact scalar factor
/// e^{-dt V} (splitting) or the Euler term -dt V y.
template <typename State>
void sde_step(const GeneratorSet& gs, double dt, const VectorXr& dx, double v_at_x,
              SdeScheme scheme, StepCache& cache, State& y) {
  if (scheme == SdeScheme::Splitting) {
    if (cache.r_ptr != &gs.r || cache.dt != dt) {
      cache.exp_r = (-dt * gs.r).exp();
      cache.r_ptr = &gs.r;
      cache.dt = dt;
    }
    y = cache.exp_r * y;
    y *= std::exp(-dt * v_at_x);
    if (gs.v_diagonal) {
      const int d = gs.fock->dim();
      VectorXc phase(d);
      for (int s = 0; s < d; ++s)
        phase[s] = std::exp(Complex(0.0, -(gs.v_diag.row(s).dot(dx))));
      for (int b = 0; b < gs.spin_dim; ++b)
        y.middleRows(b * d, d) = phase.asDiagonal() * y.middleRows(b * d, d).eval();
    } else {
      MatrixXc arg = MatrixXc::Zero(gs.fock->dim(), gs.fock->dim());
      for (int ell = 0; ell < dx.size(); ++ell) arg -= kI * dx[ell] * gs.v[ell];
      MatrixXc u = arg.exp();
      apply_fock_blockwise(u, gs.spin_dim, y);
    }
  } else {
    State dy = -dt * (gs.h_full * y).eval() - dt * v_at_x * y;
    for (int ell = 0; ell < dx.size(); ++ell) {
      State vy = y;
      apply_fock_blockwise(gs.v[ell], gs.spin_dim, vy);
      dy -= kI * dx[ell] * vy;
    }
    y += dy;
  }
}

}  // namespace

SpinKernelResult integrate_sde(const DriverPath& path, const GeneratorProvider& gens,
                               const Potential& V, const CouplingFamily& coupling,
                               const VectorXc& eta0, SdeScheme scheme) {
  const int k = path.steps();
  SpinKernelResult res;
  res.scheme = scheme;
  res.state = eta0;
  res.bound_integral = 0.0;
  res.max_step_excess = 0.0;
  const double eta_norm = eta0.norm();
  if (!(eta_norm > 0.0)) throw InputError("integrate_sde: eta must be nonzero");

  StepCache cache;
  double lambda2 = -1.0;
  const bool lambda_const = coupling.x_independent();
  double prev_log = std::log(eta_norm);
  for (int j = 0; j < k; ++j) {
    const GeneratorSet& gs = gens(j);
    const double dt = path.grid.dt(j);
    const VectorXr dx = path.delta_x(j);
    const double v_here = V(path.positions.row(j));
    if (lambda2 < 0.0 || !lambda_const) {
      const double lam = lambda_bound(coupling, path.positions.row(j));
      lambda2 = lam * lam;
    }
    res.bound_integral += dt * (lambda2 - v_here);

    sde_step(gs, dt, dx, v_here, scheme, cache, res.state);
    if (!res.state.allFinite()) throw NumericalError("integrate_sde: non-finite state", j + 1);
    const double log_now = std::log(res.state.norm());
    const double excess = (log_now - prev_log) - dt * (lambda2 - v_here);
    if (scheme == SdeScheme::Splitting && excess > res.max_step_excess)
      res.max_step_excess = excess;
    prev_log = log_now;
  }
  res.log_norm_ratio = std::log(res.state.norm() / eta_norm);
  return res;
}

MatrixXc integrate_sde_operator(const DriverPath& path, const GeneratorProvider& gens,
                                const Potential& V, const CouplingFamily& coupling,
                                SdeScheme scheme) {
  (void)coupling;
  const int k = path.steps();
  const GeneratorSet& first = gens(0);
  MatrixXc y = MatrixXc::Identity(first.total_dim(), first.total_dim());
  StepCache cache;
  for (int j = 0; j < k; ++j) {
    const GeneratorSet& gs = gens(j);
    sde_step(gs, path.grid.dt(j), VectorXr(path.delta_x(j)), V(path.positions.row(j)), scheme,
             cache, y);
    if (!y.allFinite()) throw NumericalError("integrate_sde_operator: non-finite state", j + 1);
  }
  return y;
}

double pathwise_adjoint_check(const DriverPath& path, const CouplingFamily& coupling,
                              const VectorXr& xi, const Potential& V,
                              std::shared_ptr<const TruncatedFock> fock) {
  PathGenerators fwd(path, coupling, xi, fock);
  DriverPath rev_path = reverse_path(path);
  PathGenerators rev(rev_path, coupling, xi, fock);
  MatrixXc y_fwd = integrate_sde_operator(path, fwd.provider(), V, coupling);
  MatrixXc y_rev = integrate_sde_operator(rev_path, rev.provider(), V, coupling);
  return (y_rev - y_fwd.adjoint()).operatorNorm();
}

GeneratorProvider constant_generators(const GeneratorSet& gens) {
  return [&gens](int) -> const GeneratorSet& { return gens; };
}

PathGenerators::PathGenerators(const DriverPath& path, const CouplingFamily& coupling,
                               const VectorXr& xi, std::shared_ptr<const TruncatedFock> fock) {
  if (coupling.x_independent()) {
    sets_.push_back(build_generators(coupling, xi, path.positions.row(0), fock, 0.0));
  } else {
    sets_.reserve(path.steps() + 1);
    for (int j = 0; j <= path.steps(); ++j)
      sets_.push_back(build_generators(coupling, xi, path.positions.row(j), fock, 0.0));
  }
}

}  // namespace fkmc
