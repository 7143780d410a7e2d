#pragma once

#include "fkmc/basic_processes.hpp"
#include "fkmc/fock.hpp"

namespace fkmc {

/// Frozen evaluation point of the scalar Feynman-Kac integrand W^V_{xi,t}:
/// the basic processes at one grid time plus the contraction w_{0,t}.
struct ScalarKernelSample {
  const BasicProcessTrace* trace;
  int t_idx;
  Complex u_neg_xi;     // u^V_{-xi, t}
  VectorXc u_plus;      // U+_t
  VectorXc u_minus;     // U^-_{0,t}
  VectorXc w0t;         // w_{0,t} diagonal
};

ScalarKernelSample make_scalar_sample(const BasicProcessTrace& trace, int t_idx);

/// <zeta(g), W^V_{xi,t} zeta(h)> = exp(-u^V_{-xi,t} - <U^-_t, h> + <g, U^+_t> + <g, w_{0,t} h>).
/// Closed form, independent of any Fock truncation.
Complex matrix_element(const ScalarKernelSample& sample, const VectorXc& g, const VectorXc& h);

/// Normal-ordered operator realization on a truncated Fock space.
MatrixXc as_operator(const ScalarKernelSample& sample, const TruncatedFock& fock);

/// |<zeta(g), W_t[reverse(X)] zeta(h)> - conj(<zeta(h), W_t[X] zeta(g)>)| using
/// the given discretization of the basic processes on the forward and the
/// reversed path. Midpoint discretization makes this vanish identically.
double reversal_check(const DriverPath& path, std::shared_ptr<const CouplingFamily> coupling,
                      const VectorXr& xi, const Potential& V, const VectorXc& g, const VectorXc& h,
                      Discretization flavor = Discretization::StratonovichMidpoint);

}  // namespace fkmc
