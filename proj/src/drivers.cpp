#include "fkmc/drivers.hpp"

#include <cmath>
#include <sstream>

#include "fkmc/rng.hpp"

namespace fkmc {

TimeGrid TimeGrid::uniform(double horizon, int steps) {
  if (horizon <= 0.0 || steps < 1) throw ConfigError("time grid: horizon > 0 and steps >= 1");
  TimeGrid g;
  g.horizon = horizon;
  g.nodes = VectorXr::LinSpaced(steps + 1, 0.0, horizon);
  g.nodes[steps] = horizon;
  return g;
}

TimeGrid TimeGrid::refined_towards_end(double horizon, int steps, double split) {
  if (horizon <= 0.0 || steps < 2) throw ConfigError("time grid: horizon > 0 and steps >= 2");
  if (split <= 0.0 || split >= 1.0) throw ConfigError("time grid: split in (0,1)");
  TimeGrid g;
  g.horizon = horizon;
  g.nodes = VectorXr(steps + 1);
  const int uniform_steps = steps / 2;
  const int geo_steps = steps - uniform_steps;
  for (int j = 0; j <= uniform_steps; ++j)
    g.nodes[j] = split * horizon * double(j) / uniform_steps;
  // Remaining gap halves at each step; the last node lands exactly on T.
  double gap = (1.0 - split) * horizon;
  for (int j = 1; j <= geo_steps; ++j) {
    gap *= 0.5;
    g.nodes[uniform_steps + j] = horizon - gap;
  }
  g.nodes[steps] = horizon;
  return g;
}

DriverPath sample_bm(const VectorXr& x0, const TimeGrid& grid, std::uint64_t master_seed,
                     std::uint64_t path_index) {
  const int k = grid.steps();
  const int nu = static_cast<int>(x0.size());
  PathRng rng(master_seed, path_index);
  DriverPath p;
  p.grid = grid;
  p.kind = DriverKind::BrownianMotion;
  p.x0 = x0;
  p.y_end = VectorXr::Zero(nu);
  p.master_seed = master_seed;
  p.path_index = path_index;
  p.positions = MatrixXr(k + 1, nu);
  p.increments = MatrixXr(k, nu);
  p.drift = MatrixXr::Zero(k + 1, nu);
  p.positions.row(0) = x0;
  for (int j = 0; j < k; ++j) {
    const double s = std::sqrt(grid.dt(j));
    for (int d = 0; d < nu; ++d) p.increments(j, d) = s * rng.gaussian();
    p.positions.row(j + 1) = p.positions.row(j) + p.increments.row(j);
  }
  return p;
}

DriverPath sample_bridge(const VectorXr& x0, const VectorXr& y, const TimeGrid& grid,
                         std::uint64_t master_seed, std::uint64_t path_index) {
  const int k = grid.steps();
  const int nu = static_cast<int>(x0.size());
  if (y.size() != nu) throw InputError("sample_bridge: endpoint dimension mismatch");
  const double horizon = grid.horizon;
  PathRng rng(master_seed, path_index);

  MatrixXr b(k + 1, nu);  // raw Brownian motion from 0
  MatrixXr raw_inc(k, nu);
  b.row(0).setZero();
  for (int j = 0; j < k; ++j) {
    const double s = std::sqrt(grid.dt(j));
    for (int d = 0; d < nu; ++d) raw_inc(j, d) = s * rng.gaussian();
    b.row(j + 1) = b.row(j) + raw_inc.row(j);
  }

  DriverPath p;
  p.grid = grid;
  p.kind = DriverKind::Bridge;
  p.x0 = x0;
  p.y_end = y;
  p.master_seed = master_seed;
  p.path_index = path_index;
  p.positions = MatrixXr(k + 1, nu);
  p.increments = MatrixXr(k, nu);
  p.drift = MatrixXr::Zero(k + 1, nu);

  // Explicit solution with a trapezoid rule for int_0^t B_s/(T-s)^2 ds; the
  // last node is pinned to y and never evaluates the singular weight at T.
  VectorXr integral = VectorXr::Zero(nu);
  p.positions.row(0) = x0;
  for (int j = 1; j < k; ++j) {
    const double t_prev = grid.nodes[j - 1], t_cur = grid.nodes[j];
    const double w_prev = 1.0 / ((horizon - t_prev) * (horizon - t_prev));
    const double w_cur = 1.0 / ((horizon - t_cur) * (horizon - t_cur));
    integral += 0.5 * (t_cur - t_prev) * (w_prev * b.row(j - 1) + w_cur * b.row(j)).transpose();
    const double a = t_cur / horizon;
    p.positions.row(j) = a * y.transpose() + (1.0 - a) * x0.transpose() + b.row(j) -
                         (horizon - t_cur) * integral.transpose();
  }
  p.positions.row(k) = y;

  // Drift from the Ito-integral representation; increments recomputed so the
  // discrete SDE identity is exact.
  VectorXr drift_acc = (y - x0) / horizon;
  for (int j = 0; j < k; ++j) {
    p.drift.row(j) = drift_acc;
    drift_acc -= raw_inc.row(j).transpose() / (horizon - grid.nodes[j]);
    p.increments.row(j) = p.positions.row(j + 1) - p.positions.row(j) -
                          p.drift.row(j) * grid.dt(j);
  }
  return p;
}

DriverPath frozen_path(const VectorXr& x0, const TimeGrid& grid) {
  const int k = grid.steps();
  const int nu = static_cast<int>(x0.size());
  DriverPath p;
  p.grid = grid;
  p.kind = DriverKind::BrownianMotion;
  p.x0 = x0;
  p.y_end = x0;
  p.positions = x0.transpose().replicate(k + 1, 1);
  p.increments = MatrixXr::Zero(k, nu);
  p.drift = MatrixXr::Zero(k + 1, nu);
  return p;
}

DriverPath reverse_path(const DriverPath& path) {
  const int k = path.steps();
  const int nu = path.dim();
  DriverPath r;
  r.master_seed = path.master_seed;
  r.path_index = path.path_index;
  r.grid.horizon = path.grid.horizon;
  r.grid.nodes = VectorXr(k + 1);
  for (int j = 0; j <= k; ++j)
    r.grid.nodes[j] = path.grid.horizon - path.grid.nodes[k - j];
  r.grid.nodes[0] = 0.0;
  r.grid.nodes[k] = path.grid.horizon;

  r.positions = MatrixXr(k + 1, nu);
  for (int j = 0; j <= k; ++j) r.positions.row(j) = path.positions.row(k - j);
  r.x0 = r.positions.row(0);
  r.increments = MatrixXr(k, nu);
  r.drift = MatrixXr::Zero(k + 1, nu);

  if (path.kind == DriverKind::ReversedBrownianMotion) {
    // Reversing a reversed Brownian motion restores plain Brownian motion.
    r.kind = DriverKind::BrownianMotion;
    r.y_end = VectorXr::Zero(nu);
    for (int j = 0; j < k; ++j)
      r.increments.row(j) = r.positions.row(j + 1) - r.positions.row(j);
    return r;
  }

  // Reversed bridge from y to x (and a reversed BM is a bridge back to its
  // start); drift from the singular ratio form at interior nodes.
  r.kind = (path.kind == DriverKind::Bridge) ? DriverKind::Bridge
                                             : DriverKind::ReversedBrownianMotion;
  const VectorXr target = path.x0;
  r.y_end = target;
  for (int j = 0; j < k; ++j) {
    const double remaining = r.grid.horizon - r.grid.nodes[j];
    r.drift.row(j) = (target.transpose() - r.positions.row(j)) / remaining;
    r.increments.row(j) = r.positions.row(j + 1) - r.positions.row(j) -
                          r.drift.row(j) * r.grid.dt(j);
  }
  return r;
}

namespace {

double double_factorial(int n) {
  // (2j)!! = 2^j j!, (2j+1)!! = (2j+1)!/(2j)!!, (-1)!! = 0!! = 1.
  double r = 1.0;
  for (int v = n; v > 1; v -= 2) r *= v;
  return r;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double bridge_drift_moment(int p, double t, double horizon, double dist, int nu) {
  if (p < 1) throw InputError("bridge_drift_moment: p >= 1 required");
  if (!(t >= 0.0 && t < horizon)) throw InputError("bridge_drift_moment: t in [0, T) required");
  double sum = 0.0;
  for (int l = 0; l <= p; ++l) {
    const double num = double_factorial(2 * p - 2 + nu);
    const double den = double_factorial(2 * (p - l) - 2 + nu);
    const double dist_pow = std::pow(dist, 2 * (p - l)) / std::pow(horizon, 2 * (p - l));
    const double time_pow = std::pow(t / (horizon * (horizon - t)), l);
    sum += (num / den) * binom(p, l) * dist_pow * time_pow;
  }
  return sum;
}

std::string path_to_csv(const DriverPath& path, long path_id) {
  std::ostringstream os;
  os.precision(17);
  for (int j = 0; j <= path.steps(); ++j) {
    os << path_id << ',' << j << ',' << path.grid.nodes[j];
    for (int d = 0; d < path.dim(); ++d) os << ',' << path.positions(j, d);
    for (int d = 0; d < path.dim(); ++d)
      os << ',' << (j < path.steps() ? path.increments(j, d) : 0.0);
    os << '\n';
  }
  return os.str();
}

}  // namespace fkmc
