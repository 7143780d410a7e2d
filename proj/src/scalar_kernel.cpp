#include "fkmc/scalar_kernel.hpp"

namespace fkmc {

ScalarKernelSample make_scalar_sample(const BasicProcessTrace& trace, int t_idx) {
  if (t_idx < 0 || t_idx > trace.steps()) throw InputError("scalar sample: bad index");
  ScalarKernelSample s;
  s.trace = &trace;
  s.t_idx = t_idx;
  s.u_neg_xi = trace.u_flipped_xi(t_idx);
  s.u_plus = trace.u_plus[t_idx];
  if (trace.nelson) {
    // Resummed Nelson integrand: exp{-a†(U^{N,+})} Gamma(w) exp{-a(U^{N,-})},
    // i.e. the generic dressing with a_plus = i U^{N,+}, a_minus = -i U^{N,-}.
    s.u_plus = kI * s.u_plus;
    s.u_minus = -kI * nelson_u_minus(trace)[t_idx];
  } else {
    s.u_minus = u_minus_row(trace, t_idx)[0];
  }
  auto [w_bar, w] = contraction_weight(*trace.modes, trace.path, 0, t_idx);
  s.w0t = w;
  return s;
}

Complex matrix_element(const ScalarKernelSample& sample, const VectorXc& g, const VectorXc& h) {
  const ModeSpace& modes = *sample.trace->modes;
  const Complex expo = -sample.u_neg_xi - inner_product(modes, sample.u_minus, h) +
                       inner_product(modes, g, sample.u_plus) +
                       inner_product(modes, g, VectorXc(sample.w0t.cwiseProduct(h)));
  return std::exp(expo);
}

MatrixXc as_operator(const ScalarKernelSample& sample, const TruncatedFock& fock) {
  return normal_ordered_dressing(fock, sample.u_neg_xi, sample.u_plus, sample.w0t,
                                 sample.u_minus);
}

double reversal_check(const DriverPath& path, std::shared_ptr<const CouplingFamily> coupling,
                      const VectorXr& xi, const Potential& V, const VectorXc& g, const VectorXc& h,
                      Discretization flavor) {
  BasicProcessTrace forward = integrate(path, coupling, xi, V, flavor);
  DriverPath reversed = reverse_path(path);
  BasicProcessTrace backward = integrate(reversed, coupling, xi, V, flavor);
  const int t_idx = path.steps();
  Complex me_rev = matrix_element(make_scalar_sample(backward, t_idx), g, h);
  Complex me_fwd = matrix_element(make_scalar_sample(forward, t_idx), h, g);
  return std::abs(me_rev - std::conj(me_fwd));
}

}  // namespace fkmc
