#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fkmc/common.hpp"

namespace fkmc {

/// Partition 0 = t_0 < ... < t_K = T of the time horizon.
struct TimeGrid {
  double horizon = 0.0;
  VectorXr nodes;  // K+1 strictly increasing entries, nodes[0]=0, nodes[K]=T

  int steps() const { return static_cast<int>(nodes.size()) - 1; }
  double dt(int j) const { return nodes[j + 1] - nodes[j]; }

  static TimeGrid uniform(double horizon, int steps);
  /// Uniform on [0, split*T], geometrically refined towards T afterwards
  /// (for bridge runs, where the drift blows up at the endpoint).
  static TimeGrid refined_towards_end(double horizon, int steps, double split = 0.5);
};

enum class DriverKind { BrownianMotion, Bridge, ReversedBrownianMotion };

/// Sampled driver path: positions, Brownian increments and drift samples on a
/// grid. The discrete Ito identity X_{j+1} - X_j = dB_j + Y_j dt_j holds
/// exactly by construction.
struct DriverPath {
  TimeGrid grid;
  DriverKind kind = DriverKind::BrownianMotion;
  MatrixXr positions;   // (K+1) x nu
  MatrixXr increments;  // K x nu, Brownian increments dB_j
  MatrixXr drift;       // (K+1) x nu, Y_{t_j}; zero for Brownian motion, row K unused
  VectorXr x0, y_end;   // y_end only meaningful for bridges
  std::uint64_t master_seed = 0, path_index = 0;

  int steps() const { return grid.steps(); }
  int dim() const { return static_cast<int>(positions.cols()); }
  VectorXr delta_x(int j) const { return positions.row(j + 1) - positions.row(j); }
};

DriverPath sample_bm(const VectorXr& x0, const TimeGrid& grid, std::uint64_t master_seed,
                     std::uint64_t path_index);

/// Brownian bridge from x0 to y over the grid horizon, sampled from the
/// explicit solution formula with a trapezoidal evaluation of the correction
/// integral; the endpoint is pinned exactly. Drift samples use the
/// stochastic-integral form Y_t = (y-x0)/T - sum dB_i/(T-t_i).
DriverPath sample_bridge(const VectorXr& x0, const VectorXr& y, const TimeGrid& grid,
                         std::uint64_t master_seed, std::uint64_t path_index);

/// A path with X identically x0 and zero increments (test helper).
DriverPath frozen_path(const VectorXr& x0, const TimeGrid& grid);

/// Pathwise time reversal: positions reversed in index, increments and drift
/// recomputed. A reversed bridge from x to y is a bridge from y to x.
DriverPath reverse_path(const DriverPath& path);

/// Closed form E[|Y_t|^{2p}] for the Brownian bridge drift at distance
/// dist = |x0 - y|, horizon T, dimension nu (Gaussian drift moments).
double bridge_drift_moment(int p, double t, double horizon, double dist, int nu);

/// CSV dump: path_id, j, t_j, X_1..X_nu, dB_1..dB_nu.
std::string path_to_csv(const DriverPath& path, long path_id);

}  // namespace fkmc
