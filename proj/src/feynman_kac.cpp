#include "fkmc/feynman_kac.hpp"

#include <cmath>

namespace fkmc {

namespace {

constexpr double kBoundSlack = 1e-8;

DriverPath sample_fiber_path(const TimeGrid& grid, int nu, const McOptions& opts,
                             std::size_t item) {
  if (!opts.antithetic) return sample_bm(VectorXr::Zero(nu), grid, opts.master_seed, item);
  DriverPath p = sample_bm(VectorXr::Zero(nu), grid, opts.master_seed, item / 2);
  if (item % 2 == 1) {
    p.increments = -p.increments;
    for (int j = 0; j < p.steps(); ++j)
      p.positions.row(j + 1) = p.positions.row(j) + p.increments.row(j);
  }
  return p;
}

bool coupling_is_nelson(const CouplingFamily& c) {
  return c.spin_dim() == 1 && c.spin_channels() == 1 &&
         std::abs(c.spin_matrices()[0](0, 0) + 1.0) < 1e-14;
}

bool coupling_f_is_zero(const CouplingFamily& c, const VectorXr& x) {
  return c.at(x).F.cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

double gaussian_kernel(const VectorXr& x, const VectorXr& y, double t) {
  const int nu = static_cast<int>(x.size());
  return std::pow(2.0 * M_PI * t, -0.5 * nu) * std::exp(-(x - y).squaredNorm() / (2.0 * t));
}

MatrixXc coherent_block(const TruncatedFock& fock, int spin_dim, const MatrixXc& op,
                        const VectorXc& g, const VectorXc& h) {
  const int d = fock.dim();
  VectorXc zg = exp_vector(fock, g).first;
  VectorXc zh = exp_vector(fock, h).first;
  MatrixXc out(spin_dim, spin_dim);
  for (int i = 0; i < spin_dim; ++i)
    for (int j = 0; j < spin_dim; ++j)
      out(i, j) = zg.dot(op.block(i * d, j * d, d, d) * zh);
  return out;
}

EstimatorResult estimate_fiber_matrix_element(std::shared_ptr<const CouplingFamily> coupling,
                                              const VectorXr& xi, double t, const VectorXc& g,
                                              const VectorXc& h, const TimeGrid& grid,
                                              std::shared_ptr<const TruncatedFock> fock,
                                              EstimatorMode mode, const McOptions& opts) {
  if (!coupling->x_independent())
    throw InputError("fiber estimator: couplings must be x-independent");
  if (std::abs(grid.horizon - t) > 1e-12) throw InputError("fiber estimator: grid horizon != t");
  const ModeSpace& modes = coupling->modes();
  const int nu = modes.space_dim();
  const int l = coupling->spin_dim();
  const bool nelson = coupling_is_nelson(*coupling);
  const bool f_zero = coupling_f_is_zero(*coupling, VectorXr::Zero(nu));
  const Potential v0 = zero_potential();

  GeneratorSet gens;
  VectorXc zh, zg;
  if (mode == EstimatorMode::SdeOnTruncated || opts.with_oracle) {
    gens = build_generators(*coupling, xi, VectorXr::Zero(nu), fock, 0.0);
  }
  if (mode == EstimatorMode::SdeOnTruncated) {
    zh = exp_vector(*fock, h).first;
    zg = exp_vector(*fock, g).first;
  }

  auto per_path = [&](std::size_t item, MatrixStats& acc) {
    DriverPath path = sample_fiber_path(grid, nu, opts, item);
    MatrixXc sample(l, l);
    if (mode == EstimatorMode::SdeOnTruncated) {
      const int d = fock->dim();
      for (int j = 0; j < l; ++j) {
        VectorXc eta = VectorXc::Zero(l * d);
        eta.segment(j * d, d) = zh;
        SpinKernelResult r =
            integrate_sde(path, constant_generators(gens), v0, *coupling, eta, opts.scheme);
        if (opts.scheme == SdeScheme::Splitting) {
          acc.max_bound_excess = std::max(acc.max_bound_excess, r.max_step_excess);
          if (r.log_norm_ratio > r.bound_integral + kBoundSlack) {
            ++acc.bound_violations;
            throw NumericalError("fiber estimator: path norm bound violated");
          }
        }
        for (int i = 0; i < l; ++i) sample(i, j) = zg.dot(r.state.segment(i * d, d));
      }
    } else if (l == 1 && (f_zero || nelson)) {
      BasicProcessTrace tr = nelson && !f_zero ? nelson_trace(path, coupling, xi, v0)
                                               : integrate(path, coupling, xi, v0);
      sample(0, 0) = matrix_element(make_scalar_sample(tr, path.steps()), g, h);
    } else {
      BasicProcessTrace tr = integrate(path, coupling, xi, v0);
      sample = series_matrix_element(g, h, tr, path.steps(), opts.series_n_max).value;
    }
    acc.add(sample);
  };

  MatrixStats stats = parallel_reduce<MatrixStats>(
      opts.n_paths, opts.workers, opts.chunk_size, [&]() { return MatrixStats(l, l); },
      per_path);

  EstimatorResult res;
  res.estimate = stats.mean();
  res.se = stats.se();
  res.n_samples = stats.n;
  res.max_bound_excess = stats.max_bound_excess;
  if (opts.with_oracle) {
    OracleSemigroup oracle(gens.h_full);
    res.oracle = coherent_block(*fock, l, oracle.at(t), g, h);
    res.max_abs_error = (*res.oracle - res.estimate).cwiseAbs().maxCoeff();
    res.max_z = 0.0;
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) {
        const double err = std::abs(res.estimate(i, j) - (*res.oracle)(i, j));
        const double se = res.se(i, j);
        res.max_z = std::max(res.max_z, se > 0.0 ? err / se : (err > 1e-12 ? 1e18 : 0.0));
      }
  }
  return res;
}

EstimatorResult estimate_kernel(std::shared_ptr<const CouplingFamily> coupling, double t,
                                const VectorXr& x, const VectorXr& y, const TimeGrid& grid,
                                std::shared_ptr<const TruncatedFock> fock, const Potential& V,
                                const McOptions& opts) {
  const ModeSpace& modes = coupling->modes();
  if (modes.momentum().cwiseAbs().maxCoeff() != 0.0)
    throw InputError("kernel estimator: m = 0 required");
  if (std::abs(grid.horizon - t) > 1e-12) throw InputError("kernel estimator: grid horizon != t");
  const int l = coupling->spin_dim();
  const int dim_total = l * fock->dim();
  const VectorXr xi0 = VectorXr::Zero(modes.space_dim());

  auto per_path = [&](std::size_t item, MatrixStats& acc) {
    // T_t(x,y) integrates over bridges from y to x.
    DriverPath path = sample_bridge(y, x, grid, opts.master_seed, item);
    PathGenerators gens(path, *coupling, xi0, fock);
    MatrixXc w = integrate_sde_operator(path, gens.provider(), V, *coupling, opts.scheme);
    acc.add(w);
  };

  MatrixStats stats = parallel_reduce<MatrixStats>(
      opts.n_paths, opts.workers, opts.chunk_size,
      [&]() { return MatrixStats(dim_total, dim_total); }, per_path);

  EstimatorResult res;
  res.prefactor = gaussian_kernel(x, y, t);
  res.estimate = res.prefactor * stats.mean();
  res.se = res.prefactor * stats.se();
  res.n_samples = stats.n;
  return res;
}

SemigroupReport semigroup_property_check(std::shared_ptr<const CouplingFamily> coupling,
                                         const VectorXr& xi, double s, double t,
                                         const VectorXc& g, const VectorXc& h, int steps,
                                         std::shared_ptr<const TruncatedFock> fock,
                                         const McOptions& opts) {
  TimeGrid grid = TimeGrid::uniform(s + t, steps);
  EstimatorResult combined = estimate_fiber_matrix_element(
      coupling, xi, s + t, g, h, grid, fock, EstimatorMode::SdeOnTruncated, opts);

  GeneratorSet gens =
      build_generators(*coupling, xi, VectorXr::Zero(coupling->modes().space_dim()), fock, 0.0);
  OracleSemigroup oracle(gens.h_full);
  MatrixXc product = oracle.at(s) * oracle.at(t);

  SemigroupReport rep;
  rep.mc_combined = combined.estimate;
  rep.oracle_product = coherent_block(*fock, coupling->spin_dim(), product, g, h);
  rep.se = combined.se;
  rep.max_z = 0.0;
  for (int i = 0; i < rep.mc_combined.rows(); ++i)
    for (int j = 0; j < rep.mc_combined.cols(); ++j) {
      const double err = std::abs(rep.mc_combined(i, j) - rep.oracle_product(i, j));
      const double se = rep.se(i, j);
      rep.max_z = std::max(rep.max_z, se > 0.0 ? err / se : (err > 1e-12 ? 1e18 : 0.0));
    }
  return rep;
}

std::vector<SweepRow> convergence_sweep(std::shared_ptr<const CouplingFamily> coupling,
                                        const VectorXr& xi, double t, const VectorXc& g,
                                        const VectorXc& h, const std::vector<int>& steps_list,
                                        const std::vector<int>& boson_list,
                                        const std::vector<long>& paths_list,
                                        EstimatorMode mode, const McOptions& base_opts) {
  std::vector<SweepRow> rows;
  for (int n_bosons : boson_list) {
    auto fock = std::make_shared<TruncatedFock>(coupling->modes_ptr(), n_bosons);
    for (int steps : steps_list) {
      TimeGrid grid = TimeGrid::uniform(t, steps);
      for (long n_paths : paths_list) {
        McOptions opts = base_opts;
        opts.n_paths = n_paths;
        EstimatorResult r =
            estimate_fiber_matrix_element(coupling, xi, t, g, h, grid, fock, mode, opts);
        SweepRow row;
        row.steps = steps;
        row.max_bosons = n_bosons;
        row.n_paths = n_paths;
        row.dt = t / steps;
        row.max_abs_error = r.max_abs_error;
        row.max_se = r.se.maxCoeff();
        row.max_z = r.max_z;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace fkmc
