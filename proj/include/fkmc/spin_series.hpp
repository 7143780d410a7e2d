#pragma once

#include "fkmc/basic_processes.hpp"

namespace fkmc {

/// One Wick term: assignment of {0..n-1} to creation (A), annihilation (B) or
/// paired (C) slots, with a perfect matching on C.
struct PartitionTerm {
  std::vector<int8_t> kind;               // 0 = A, 1 = B, 2 = C
  std::vector<std::pair<int, int>> pairs;  // (c, c') with c < c'
};

/// All A/B/C partitions of [n] with |C| even, C fully paired.
/// Count: sum over even k of C(n,k) (k-1)!! 2^{n-k}.
std::vector<PartitionTerm> partition_terms(int n);

/// Q^{(n)}_t(g,h; t_{[n]}) for grid-aligned ordered times (indices into the
/// path grid, nondecreasing, all <= t_idx). Direct partition enumeration.
MatrixXc q_n(const VectorXc& g, const VectorXc& h, const std::vector<int>& time_idx,
             const BasicProcessTrace& trace, int t_idx);

struct SeriesResult {
  Complex scalar_prefactor;          // <zeta(g), W^V_{xi,t} zeta(h)>
  MatrixXc q_total;                  // id + sum of integrated orders 1..N_max
  MatrixXc value;                    // scalar_prefactor * q_total
  std::vector<MatrixXc> orders;      // integrated Q^{(n)}, n = 0..N_max
  std::vector<double> order_norms;   // Frobenius norms of the orders
};

/// Simplex-integrated series of matrix elements
///   <zeta(g), W_{xi,t} zeta(h)> (id + sum_n int_{t Delta_n} Q^{(n)} dt_[n])
/// with nested left-point sums over strictly increasing grid indices,
/// evaluated by a transfer recursion over grid positions (identical values to
/// the tuple enumeration, without the combinatorial cost).
SeriesResult series_matrix_element(const VectorXc& g, const VectorXc& h,
                                   const BasicProcessTrace& trace, int t_idx, int n_max);

/// Brute-force tuple enumeration of the same sums (test oracle; cost grows as
/// C(K, n) per order).
SeriesResult series_matrix_element_enumerated(const VectorXc& g, const VectorXc& h,
                                              const BasicProcessTrace& trace, int t_idx,
                                              int n_max);

}  // namespace fkmc
