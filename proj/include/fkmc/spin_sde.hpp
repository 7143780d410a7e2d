#pragma once

#include <memory>

#include "fkmc/basic_processes.hpp"
#include "fkmc/fock.hpp"

namespace fkmc {

/// Operators of the generalized fiber Hamiltonian at one position, on
/// C^L tensor (truncated Fock). Block index = spin * dim_fock + fock index.
struct GeneratorSet {
  std::shared_ptr<const TruncatedFock> fock;
  int spin_dim = 1;
  VectorXr xi, x;
  std::vector<MatrixXc> v;   // nu Fock-space operators v_l = xi_l - dGamma(m_l) - phi(G_l)
  bool v_diagonal = false;   // true when G = 0: v_l is diagonal
  MatrixXr v_diag;           // dim_fock x nu, eigenvalues xi_l - sum_k n_k m_{k,l}
  MatrixXc h_sc;             // scalar fiber Hamiltonian on Fock (includes build-time V)
  MatrixXc r;                // H_full - (1/2) sum v_l^2 - V, on the full block space
  MatrixXc h_full;           // id tensor h_sc - sum_j sigma_j tensor phi(F_j)

  int total_dim() const { return spin_dim * fock->dim(); }
};

/// Kronecker product A (L x L) tensor B (fock), in the block layout above.
MatrixXc spin_kron(const MatrixXc& a, const MatrixXc& b);

GeneratorSet build_generators(const CouplingFamily& coupling, const VectorXr& xi,
                              const VectorXr& x, std::shared_ptr<const TruncatedFock> fock,
                              double potential_value = 0.0);

/// Operator norm of the L x L matrix with entries ||omega^{-1/2} (sigma·F_x)_{ij}||.
double lambda_bound(const CouplingFamily& coupling, const VectorXr& x);

enum class SdeScheme { Splitting, EulerMaruyama };

struct SpinKernelResult {
  VectorXc state;           // Y_t
  double log_norm_ratio;    // ln ||Y_t|| / ||eta||
  double bound_integral;    // sum dt (Lambda(X_j)^2 - V(X_j)), left-point
  double max_step_excess;   // max_j of per-step ln-norm growth above the bound
  SdeScheme scheme;
};

using GeneratorProvider = std::function<const GeneratorSet&(int node_idx)>;

/// Integrates dY = -H^V(xi, X_s) Y ds - i v(xi, X_s) Y dX_s along the path.
/// Splitting: Y_{j+1} = exp(-i sum_l v_l dX_l) exp(-dt V) exp(-dt R) Y_j (weak
/// order 1, unitary factor exactly norm preserving). Euler-Maruyama kept as
/// the independent cross-check discretization. Generator sets supplied by the
/// provider must be built with potential_value = 0; V enters per step here.
SpinKernelResult integrate_sde(const DriverPath& path, const GeneratorProvider& gens,
                               const Potential& V, const CouplingFamily& coupling,
                               const VectorXc& eta0, SdeScheme scheme = SdeScheme::Splitting);

/// Same recursion applied to the identity matrix: the full integrated operator.
MatrixXc integrate_sde_operator(const DriverPath& path, const GeneratorProvider& gens,
                                const Potential& V, const CouplingFamily& coupling,
                                SdeScheme scheme = SdeScheme::Splitting);

/// || W_t[reverse(X)] - W_t[X]^* || for the splitting scheme on the truncated
/// space; decays at the scheme's weak order under grid refinement.
double pathwise_adjoint_check(const DriverPath& path, const CouplingFamily& coupling,
                              const VectorXr& xi, const Potential& V,
                              std::shared_ptr<const TruncatedFock> fock);

/// Convenience provider for x-independent couplings (one shared GeneratorSet).
GeneratorProvider constant_generators(const GeneratorSet& gens);

/// Provider evaluating the couplings at every path node (single shared set
/// when the coupling is x-independent).
class PathGenerators {
 public:
  PathGenerators(const DriverPath& path, const CouplingFamily& coupling, const VectorXr& xi,
                 std::shared_ptr<const TruncatedFock> fock);
  const GeneratorSet& at(int node_idx) const {
    return sets_.size() == 1 ? sets_[0] : sets_[node_idx];
  }
  GeneratorProvider provider() const {
    return [this](int j) -> const GeneratorSet& { return at(j); };
  }

 private:
  std::vector<GeneratorSet> sets_;
};

}  // namespace fkmc
