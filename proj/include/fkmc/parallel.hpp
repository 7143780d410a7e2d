#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

#include "fkmc/common.hpp"

namespace fkmc {

/// Deterministic chunked map-reduce: items are grouped into fixed chunks,
/// workers pull whole chunks, and per-chunk accumulators are merged in chunk
/// order. Results are bit-identical for any worker count.
template <class Acc, class MakeAcc, class PerItem>
Acc parallel_reduce(std::size_t n_items, int workers, std::size_t chunk_size, MakeAcc make_acc,
                    PerItem per_item) {
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
  std::vector<Acc> partials;
  partials.reserve(n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) partials.push_back(make_acc());

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error = nullptr;
  std::atomic<bool> failed{false};
  auto work = [&]() {
    try {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t c = next.fetch_add(1);
        if (c >= n_chunks) break;
        const std::size_t lo = c * chunk_size;
        const std::size_t hi = std::min(n_items, lo + chunk_size);
        for (std::size_t i = lo; i < hi; ++i) per_item(i, partials[c]);
      }
    } catch (...) {
      if (!failed.exchange(true)) first_error = std::current_exception();
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  Acc total = make_acc();
  for (auto& p : partials) total.merge(p);
  return total;
}

/// Streaming mean / standard error for complex matrix-valued samples.
struct MatrixStats {
  MatrixXc sum;
  MatrixXr sumsq;  // sum of |z|^2 per entry
  long n = 0;
  double max_bound_excess = 0.0;  // worst per-step norm-bound excess seen
  long bound_violations = 0;

  MatrixStats(int rows, int cols)
      : sum(MatrixXc::Zero(rows, cols)), sumsq(MatrixXr::Zero(rows, cols)) {}

  void add(const MatrixXc& sample) {
    sum += sample;
    sumsq += sample.cwiseAbs2();
    ++n;
  }
  void merge(const MatrixStats& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    n += o.n;
    max_bound_excess = std::max(max_bound_excess, o.max_bound_excess);
    bound_violations += o.bound_violations;
  }
  MatrixXc mean() const { return sum / double(n); }
  /// Per-entry standard error from the unbiased sample variance of a complex
  /// sample (total variance of real and imaginary part together).
  MatrixXr se() const {
    if (n < 2) return MatrixXr::Zero(sum.rows(), sum.cols());
    MatrixXr var = (sumsq / double(n) - mean().cwiseAbs2()) * (double(n) / double(n - 1));
    return (var.cwiseMax(0.0) / double(n)).cwiseSqrt();
  }
};

}  // namespace fkmc
