#pragma once

#include <optional>

#include "fkmc/hamiltonians.hpp"
#include "fkmc/parallel.hpp"
#include "fkmc/scalar_kernel.hpp"
#include "fkmc/spin_series.hpp"

namespace fkmc {

/// ClosedForm: exponential-vector matrix elements (exact in the Fock
/// direction, biased only by path discretization). SdeOnTruncated: the
/// splitting scheme on the same truncated space as the oracle.
enum class EstimatorMode { ClosedForm, SdeOnTruncated };

struct McOptions {
  long n_paths = 1000;
  std::uint64_t master_seed = 1;
  int workers = 1;
  bool antithetic = false;
  int series_n_max = 4;  // ClosedForm order cap when L > 1
  SdeScheme scheme = SdeScheme::Splitting;
  std::size_t chunk_size = 256;
  bool with_oracle = true;
};

struct EstimatorResult {
  MatrixXc estimate;
  MatrixXr se;
  long n_samples = 0;
  std::optional<MatrixXc> oracle;
  double max_z = 0.0;          // max |estimate - oracle| / se over entries
  double max_abs_error = 0.0;  // max |estimate - oracle|
  double max_bound_excess = 0.0;
  double prefactor = 1.0;      // p_t(x,y) for kernel estimates, 1 otherwise
};

/// Gaussian transition density p_t(x, y).
double gaussian_kernel(const VectorXr& x, const VectorXr& y, double t);

/// Coherent-state block B(i,j) = <e_i ⊗ zeta(g), Op e_j ⊗ zeta(h)> of a block
/// operator on C^L ⊗ Fock.
MatrixXc coherent_block(const TruncatedFock& fock, int spin_dim, const MatrixXc& op,
                        const VectorXc& g, const VectorXc& h);

/// E[ <e_i zeta(g), W_{xi,t}[B] e_j zeta(h)> ] over Brownian motion paths,
/// against the matrix-exponential oracle e^{-t H(xi)} on the same truncated
/// space. x-independent couplings only (fiber case, V = 0).
EstimatorResult estimate_fiber_matrix_element(std::shared_ptr<const CouplingFamily> coupling,
                                              const VectorXr& xi, double t, const VectorXc& g,
                                              const VectorXc& h, const TimeGrid& grid,
                                              std::shared_ptr<const TruncatedFock> fock,
                                              EstimatorMode mode, const McOptions& opts);

/// Operator-valued kernel estimate T^V_t(x, y) = p_t(x,y) E[ W_{0,t}[b^{t;y,x}] ]
/// on the truncated space; requires m = 0.
EstimatorResult estimate_kernel(std::shared_ptr<const CouplingFamily> coupling, double t,
                                const VectorXr& x, const VectorXr& y, const TimeGrid& grid,
                                std::shared_ptr<const TruncatedFock> fock, const Potential& V,
                                const McOptions& opts);

struct SemigroupReport {
  MatrixXc mc_combined;      // MC estimate at horizon s + t
  MatrixXc oracle_product;   // e^{-sH} e^{-tH} sandwich
  MatrixXr se;
  double max_z = 0.0;
};

/// Statistical test of T_s(xi) T_t(xi) = T_{s+t}(xi) on coherent blocks.
SemigroupReport semigroup_property_check(std::shared_ptr<const CouplingFamily> coupling,
                                         const VectorXr& xi, double s, double t,
                                         const VectorXc& g, const VectorXc& h, int steps,
                                         std::shared_ptr<const TruncatedFock> fock,
                                         const McOptions& opts);

struct SweepRow {
  int steps = 0;
  int max_bosons = 0;
  long n_paths = 0;
  double dt = 0.0;
  double max_abs_error = 0.0;
  double max_se = 0.0;
  double max_z = 0.0;
};

/// Grid over (dt, N, n_paths) with bias / SE reporting for the fiber toy.
std::vector<SweepRow> convergence_sweep(std::shared_ptr<const CouplingFamily> coupling,
                                        const VectorXr& xi, double t, const VectorXc& g,
                                        const VectorXc& h, const std::vector<int>& steps_list,
                                        const std::vector<int>& boson_list,
                                        const std::vector<long>& paths_list,
                                        EstimatorMode mode, const McOptions& base_opts);

}  // namespace fkmc
