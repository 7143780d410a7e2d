#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fkmc/drivers.hpp"
#include "fkmc/mode_space.hpp"

namespace fkmc {

using Potential = std::function<double(const VectorXr&)>;

inline Potential zero_potential() {
  return [](const VectorXr&) { return 0.0; };
}

/// Left-point Ito sums (matching the SDE representations) or
/// Stratonovich-midpoint sums (making the time-reversal identities exact at
/// the discrete level; the divergence term is generated by the midpoint rule
/// and the potential integral switches to the trapezoid rule).
enum class Discretization { ItoLeft, StratonovichMidpoint };

/// Per-grid-node values of the basic processes along one driver path.
struct BasicProcessTrace {
  DriverPath path;
  std::shared_ptr<const ModeSpace> modes;
  std::shared_ptr<const CouplingFamily> coupling;
  Discretization flavor = Discretization::ItoLeft;
  VectorXr xi;
  bool nelson = false;  // deterministic Nelson quadrature variant

  std::vector<VectorXc> u_plus;   // U+_{t_j}, one vector per node
  std::vector<Complex> u;         // u^V_{xi, t_j}
  std::vector<double> ksq;        // ||K_{t_j}||^2 accumulated from the same sums
  std::vector<double> int_v;      // int_0^{t_j} V(X_s) ds
  std::vector<CouplingSnapshot> snapshots;  // per node; single entry if x-independent

  const CouplingSnapshot& snap(int j) const {
    return snapshots.size() == 1 ? snapshots[0] : snapshots[j];
  }
  int steps() const { return path.steps(); }
  double time(int j) const { return path.grid.nodes[j]; }

  /// u_{-xi, t_j}; the Feynman-Kac integrand always uses the flipped sign.
  Complex u_flipped_xi(int j) const;
};

/// Diagonal weights (w_bar, w) with w_bar = e^{-(t-tau) omega - i m·(X_t - X_tau)}
/// for t > tau (identity for t <= tau) and w its conjugate.
std::pair<VectorXc, VectorXc> contraction_weight(const ModeSpace& modes, const DriverPath& path,
                                                 int tau_idx, int t_idx);

/// Integrates U+, u, ||K||^2 and the potential along the whole grid.
BasicProcessTrace integrate(const DriverPath& path, std::shared_ptr<const CouplingFamily> coupling,
                            const VectorXr& xi, const Potential& V,
                            Discretization flavor = Discretization::ItoLeft);

/// U^-(t_j, t) for all j = 0..t_idx, by the backward contraction recursion.
std::vector<VectorXc> u_minus_row(const BasicProcessTrace& trace, int t_idx);

/// Symbolic midpoint sum record: formal combination sum_i iota_{s_i} f_i kept
/// in the base space; only pairings through the e^{-|s-s'| omega} kernel are
/// ever evaluated. Exactly antisymmetric under path reversal.
struct StratonovichKSum {
  std::shared_ptr<const ModeSpace> modes;
  std::vector<double> times;
  std::vector<VectorXr> positions;  // X at the entry time (for the m-phases)
  std::vector<VectorXc> entries;

  /// <this, other> with kernel <iota_s f, iota_r g> = <f, e^{-|s-r| omega + i m (X_s - X_r)} g>.
  Complex pair(const StratonovichKSum& other) const;
  double squared_norm() const { return pair(*this).real(); }
};

StratonovichKSum stratonovich_ksum(const DriverPath& path, const CouplingFamily& coupling,
                                   int tau_idx, int t_idx);

/// Deterministic-quadrature analog of the basic processes for the Nelson
/// preset (G = 0, L = S = 1, sigma_1 = -1); u carries the flipped-sign
/// -||K||^2/2 convention of the resummed Nelson integrand.
BasicProcessTrace nelson_trace(const DriverPath& path,
                               std::shared_ptr<const CouplingFamily> coupling, const VectorXr& xi,
                               const Potential& V);

/// U^{N,-}_{t_j} for the Nelson variant (weight pinned at time 0).
std::vector<VectorXc> nelson_u_minus(const BasicProcessTrace& trace);

}  // namespace fkmc
