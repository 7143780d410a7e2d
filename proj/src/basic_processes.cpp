#include "fkmc/basic_processes.hpp"

#include <cmath>

namespace fkmc {

namespace {

bool all_finite(const VectorXc& v) { return v.allFinite(); }

/// e^{-dt omega + i s (m·dx)} componentwise; s = +1 gives w, s = -1 gives w_bar.
VectorXc step_weight(const ModeSpace& modes, double dt, const VectorXr& dx, double sign) {
  VectorXr mdx = modes.momentum() * dx;
  VectorXc out(modes.mode_count());
  for (int k = 0; k < out.size(); ++k)
    out[k] = std::exp(Complex(-dt * modes.omega()[k], sign * mdx[k]));
  return out;
}

}  // namespace

Complex BasicProcessTrace::u_flipped_xi(int j) const {
  VectorXr dx = path.positions.row(j) - path.positions.row(0);
  return u[j] + 2.0 * kI * xi.dot(dx);
}

std::pair<VectorXc, VectorXc> contraction_weight(const ModeSpace& modes, const DriverPath& path,
                                                 int tau_idx, int t_idx) {
  if (tau_idx < 0 || t_idx > path.steps() || tau_idx > t_idx)
    throw InputError("contraction_weight: need 0 <= tau_idx <= t_idx <= steps");
  if (tau_idx == t_idx) {
    VectorXc one = VectorXc::Ones(modes.mode_count());
    return {one, one};
  }
  const double dt = path.grid.nodes[t_idx] - path.grid.nodes[tau_idx];
  VectorXr dx = path.positions.row(t_idx) - path.positions.row(tau_idx);
  VectorXc w_bar = step_weight(modes, dt, dx, -1.0);
  return {w_bar, w_bar.conjugate()};
}

BasicProcessTrace integrate(const DriverPath& path, std::shared_ptr<const CouplingFamily> coupling,
                            const VectorXr& xi, const Potential& V, Discretization flavor) {
  const ModeSpace& modes = coupling->modes();
  const int k = path.steps();
  const int m = modes.mode_count();
  if (xi.size() != modes.space_dim()) throw InputError("integrate: xi dimension mismatch");

  BasicProcessTrace tr;
  tr.path = path;
  tr.modes = coupling->modes_ptr();
  tr.coupling = coupling;
  tr.flavor = flavor;
  tr.xi = xi;
  if (coupling->x_independent()) {
    tr.snapshots.push_back(coupling->at(path.positions.row(0)));
  } else {
    tr.snapshots.reserve(k + 1);
    for (int j = 0; j <= k; ++j) tr.snapshots.push_back(coupling->at(path.positions.row(j)));
  }
  tr.u_plus.assign(k + 1, VectorXc::Zero(m));
  tr.u.assign(k + 1, Complex(0.0));
  tr.ksq.assign(k + 1, 0.0);
  tr.int_v.assign(k + 1, 0.0);

  std::vector<double> v_at(k + 1);
  for (int j = 0; j <= k; ++j) {
    v_at[j] = V(path.positions.row(j));
    if (!std::isfinite(v_at[j])) throw NumericalError("integrate: potential not finite", j);
  }

  const VectorXr& omega = modes.omega();
  VectorXr half_m2 = 0.5 * modes.momentum().rowwise().squaredNorm();

  if (flavor == Discretization::ItoLeft) {
    for (int j = 0; j < k; ++j) {
      const CouplingSnapshot& s = tr.snap(j);
      const double dt = path.grid.dt(j);
      const VectorXr dx = path.delta_x(j);
      const VectorXr mdx = modes.momentum() * dx;
      const VectorXc& up = tr.u_plus[j];

      VectorXc g_dx = s.G * dx.cast<Complex>();
      // dU+ = (G + i m U+)·dX - (omega + m^2/2) U+ dt + (i/2 m·G + q/2) dt
      VectorXc m_dot_g = (modes.momentum().cast<Complex>().array() * s.G.array()).rowwise().sum();
      VectorXc drift = 0.5 * kI * m_dot_g + 0.5 * s.q;
      tr.u_plus[j + 1] =
          up + g_dx + kI * mdx.cast<Complex>().cwiseProduct(up) -
          dt * (omega + half_m2).cast<Complex>().cwiseProduct(up) + dt * drift;

      // du = <U+,G>·dX + <U+,q_breve> dt + ||G||^2 dt / 2 + V dt - i xi·dX
      Complex up_g_dx = 0.0;
      for (int l = 0; l < dx.size(); ++l)
        up_g_dx += inner_product(modes, up, s.G.col(l)) * dx[l];
      Complex up_qb = inner_product(modes, up, s.q_breve);
      double g_norm2 = 0.0;
      for (int l = 0; l < s.G.cols(); ++l)
        g_norm2 += (modes.mu().array() * s.G.col(l).array().abs2()).sum();
      tr.u[j + 1] = tr.u[j] + up_g_dx + dt * up_qb + 0.5 * dt * g_norm2 + dt * v_at[j] -
                    kI * xi.dot(dx);
      tr.ksq[j + 1] =
          tr.ksq[j] + 2.0 * up_g_dx.real() + 2.0 * dt * up_qb.real() + dt * g_norm2;
      tr.int_v[j + 1] = tr.int_v[j] + dt * v_at[j];
      if (!all_finite(tr.u_plus[j + 1]) || !std::isfinite(std::abs(tr.u[j + 1])))
        throw NumericalError("integrate: non-finite basic process value", j + 1);
    }
  } else {
    // Midpoint sums: K entries (1/2)(iota_{t_{j+1}} G_{j+1} + iota_{t_j} G_j)·dX_j,
    // no divergence term, trapezoid potential.
    for (int j = 0; j < k; ++j) {
      const CouplingSnapshot& s0 = tr.snap(j);
      const CouplingSnapshot& s1 = tr.snap(std::min(j + 1, k));
      const double dt = path.grid.dt(j);
      const VectorXr dx = path.delta_x(j);
      VectorXc e0 = 0.5 * (s0.G * dx.cast<Complex>());
      VectorXc e1 = 0.5 * (s1.G * dx.cast<Complex>());
      VectorXc w = step_weight(modes, dt, dx, +1.0);        // iota_{t_{j+1}}^* iota_{t_j}
      VectorXc w_bar = w.conjugate();

      const VectorXc& up = tr.u_plus[j];
      // ||K_{j+1}||^2 = ||K_j||^2 + 2 Re<K_j, e> + ||e||^2
      Complex cross = inner_product(modes, up, e0) +
                      inner_product(modes, VectorXc(w.cwiseProduct(up)), e1);
      Complex ee = inner_product(modes, e0, e0) + inner_product(modes, e1, e1) +
                   2.0 * inner_product(modes, e0, VectorXc(w_bar.cwiseProduct(e1))).real();
      tr.ksq[j + 1] = tr.ksq[j] + 2.0 * cross.real() + ee.real();
      tr.u_plus[j + 1] = w.cwiseProduct(up + e0) + e1;
      tr.int_v[j + 1] = tr.int_v[j] + 0.5 * dt * (v_at[j] + v_at[j + 1]);
      VectorXr dx0 = path.positions.row(j + 1) - path.positions.row(0);
      tr.u[j + 1] = 0.5 * tr.ksq[j + 1] + tr.int_v[j + 1] - kI * xi.dot(dx0);
      if (!all_finite(tr.u_plus[j + 1]))
        throw NumericalError("integrate: non-finite basic process value", j + 1);
    }
  }
  return tr;
}

std::vector<VectorXc> u_minus_row(const BasicProcessTrace& trace, int t_idx) {
  const ModeSpace& modes = *trace.modes;
  if (t_idx < 0 || t_idx > trace.steps()) throw InputError("u_minus_row: bad index");
  std::vector<VectorXc> rows(t_idx + 1, VectorXc::Zero(modes.mode_count()));
  if (trace.nelson) throw InputError("u_minus_row: use nelson_u_minus for Nelson traces");
  for (int j = t_idx - 1; j >= 0; --j) {
    const CouplingSnapshot& s = trace.snap(j);
    const double dt = trace.path.grid.dt(j);
    const VectorXr dx = trace.path.delta_x(j);
    VectorXc w_bar = step_weight(modes, dt, dx, -1.0);
    if (trace.flavor == Discretization::ItoLeft) {
      VectorXc add = s.G * dx.cast<Complex>() + dt * s.q_breve;
      rows[j] = w_bar.cwiseProduct(rows[j + 1]) + add;
    } else {
      const CouplingSnapshot& s1 = trace.snap(j + 1);
      VectorXc e0 = 0.5 * (s.G * dx.cast<Complex>());
      VectorXc e1 = 0.5 * (s1.G * dx.cast<Complex>());
      rows[j] = w_bar.cwiseProduct(rows[j + 1] + e1) + e0;
    }
  }
  return rows;
}

Complex StratonovichKSum::pair(const StratonovichKSum& other) const {
  const ModeSpace& ms = *modes;
  Complex acc = 0.0;
  for (size_t i = 0; i < entries.size(); ++i) {
    for (size_t j = 0; j < other.entries.size(); ++j) {
      const double dt = std::abs(times[i] - other.times[j]);
      VectorXr dx = positions[i] - other.positions[j];
      VectorXr mdx = ms.momentum() * dx;
      Complex term = 0.0;
      for (int q = 0; q < ms.mode_count(); ++q)
        term += ms.mu()[q] * std::conj(entries[i][q]) *
                std::exp(Complex(-dt * ms.omega()[q], mdx[q])) * other.entries[j][q];
      acc += term;
    }
  }
  return acc;
}

StratonovichKSum stratonovich_ksum(const DriverPath& path, const CouplingFamily& coupling,
                                   int tau_idx, int t_idx) {
  if (tau_idx < 0 || t_idx > path.steps() || tau_idx > t_idx)
    throw InputError("stratonovich_ksum: need 0 <= tau_idx <= t_idx <= steps");
  StratonovichKSum rec;
  rec.modes = coupling.modes_ptr();
  for (int l = tau_idx; l < t_idx; ++l) {
    const VectorXr dx = path.delta_x(l);
    CouplingSnapshot s0 = coupling.at(path.positions.row(l));
    CouplingSnapshot s1 = coupling.at(path.positions.row(l + 1));
    VectorXc e0 = 0.5 * (s0.G * dx.cast<Complex>());
    VectorXc e1 = 0.5 * (s1.G * dx.cast<Complex>());
    if (e0.cwiseAbs().maxCoeff() > 0.0) {
      rec.times.push_back(path.grid.nodes[l]);
      rec.positions.push_back(path.positions.row(l));
      rec.entries.push_back(e0);
    }
    if (e1.cwiseAbs().maxCoeff() > 0.0) {
      rec.times.push_back(path.grid.nodes[l + 1]);
      rec.positions.push_back(path.positions.row(l + 1));
      rec.entries.push_back(e1);
    }
  }
  return rec;
}

BasicProcessTrace nelson_trace(const DriverPath& path,
                               std::shared_ptr<const CouplingFamily> coupling, const VectorXr& xi,
                               const Potential& V) {
  const ModeSpace& modes = coupling->modes();
  if (coupling->spin_dim() != 1 || coupling->spin_channels() != 1 ||
      std::abs(coupling->spin_matrices()[0](0, 0) + 1.0) > 1e-14)
    throw InputError("nelson_trace: coupling must be a Nelson preset (L = S = 1, sigma = -1)");
  const int k = path.steps();
  const int m = modes.mode_count();

  BasicProcessTrace tr;
  tr.path = path;
  tr.modes = coupling->modes_ptr();
  tr.coupling = coupling;
  tr.flavor = Discretization::ItoLeft;
  tr.xi = xi;
  tr.nelson = true;
  if (coupling->x_independent()) {
    tr.snapshots.push_back(coupling->at(path.positions.row(0)));
  } else {
    for (int j = 0; j <= k; ++j) tr.snapshots.push_back(coupling->at(path.positions.row(j)));
  }
  for (const auto& s : tr.snapshots)
    if (s.G.cwiseAbs().maxCoeff() > 0.0)
      throw InputError("nelson_trace: G must vanish for the Nelson preset");

  tr.u_plus.assign(k + 1, VectorXc::Zero(m));
  tr.u.assign(k + 1, Complex(0.0));
  tr.ksq.assign(k + 1, 0.0);
  tr.int_v.assign(k + 1, 0.0);
  for (int j = 0; j < k; ++j) {
    const double dt = path.grid.dt(j);
    const VectorXr dx = path.delta_x(j);
    VectorXc f = tr.snap(j).F.col(0);
    VectorXc w = step_weight(modes, dt, dx, +1.0);
    const VectorXc& up = tr.u_plus[j];
    // ||K_{j+1}||^2 = ||K_j||^2 + 2 Re<U+_j, F_j> dt + ||F_j||^2 dt^2
    Complex cross = inner_product(modes, up, f);
    double f2 = (modes.mu().array() * f.array().abs2()).sum();
    tr.ksq[j + 1] = tr.ksq[j] + 2.0 * dt * cross.real() + dt * dt * f2;
    tr.u_plus[j + 1] = w.cwiseProduct(up + dt * f);
    tr.int_v[j + 1] = tr.int_v[j] + dt * V(path.positions.row(j));
    VectorXr dx0 = path.positions.row(j + 1) - path.positions.row(0);
    // Flipped sign relative to the generic case.
    tr.u[j + 1] = -0.5 * tr.ksq[j + 1] + tr.int_v[j + 1] - kI * xi.dot(dx0);
    if (!all_finite(tr.u_plus[j + 1]))
      throw NumericalError("nelson_trace: non-finite value", j + 1);
  }
  return tr;
}

std::vector<VectorXc> nelson_u_minus(const BasicProcessTrace& trace) {
  if (!trace.nelson) throw InputError("nelson_u_minus: not a Nelson trace");
  const ModeSpace& modes = *trace.modes;
  const int k = trace.steps();
  std::vector<VectorXc> rows(k + 1, VectorXc::Zero(modes.mode_count()));
  VectorXc acc = VectorXc::Zero(modes.mode_count());
  for (int j = 0; j < k; ++j) {
    const double t_j = trace.time(j);
    const double dt = trace.path.grid.dt(j);
    VectorXr dx0 = trace.path.positions.row(j) - trace.path.positions.row(0);
    VectorXr mdx = modes.momentum() * dx0;
    VectorXc f = trace.snap(j).F.col(0);
    for (int q = 0; q < modes.mode_count(); ++q)
      acc[q] += std::exp(Complex(-t_j * modes.omega()[q], -mdx[q])) * f[q] * dt;
    rows[j + 1] = acc;
  }
  return rows;
}

}  // namespace fkmc
