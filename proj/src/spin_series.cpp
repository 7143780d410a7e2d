#include "fkmc/spin_series.hpp"

#include <map>

#include "fkmc/scalar_kernel.hpp"

namespace fkmc {

namespace {

void pairings_of(std::vector<int> left, std::vector<std::pair<int, int>> current,
                 std::vector<std::vector<std::pair<int, int>>>& out) {
  if (left.empty()) {
    out.push_back(current);
    return;
  }
  const int first = left.front();
  for (size_t i = 1; i < left.size(); ++i) {
    std::vector<int> rest;
    for (size_t j = 1; j < left.size(); ++j)
      if (j != i) rest.push_back(left[j]);
    auto next = current;
    next.emplace_back(first, left[i]);
    pairings_of(std::move(rest), std::move(next), out);
  }
}

/// Per-position series ingredients at grid index j with final time t_idx.
struct SeriesIngredients {
  // adg[j](s): <i wbar_{t_j,t} g - i U^-_{t_j,t}, F_s(X_j)>
  // ah[j](s):  <F_s(X_j), i w_{0,t_j} h + i U^+_{t_j}>
  std::vector<VectorXc> adg, ah;
  // Pair kernel split: pair(c,c',s,s') = sum_k beta[c'](k,s') * gamma[c](k,s)
  // with gamma bounded by the decaying weight e^{-(t - t_c) omega}.
  std::vector<MatrixXc> gamma, beta;  // mode x spin, per position
};

SeriesIngredients build_ingredients(const VectorXc& g, const VectorXc& h,
                                    const BasicProcessTrace& trace, int t_idx) {
  const ModeSpace& modes = *trace.modes;
  const CouplingFamily& coupling = *trace.coupling;
  const int s_ch = coupling.spin_channels();
  const int m = modes.mode_count();
  const double t_final = trace.time(t_idx);
  std::vector<VectorXc> u_minus = u_minus_row(trace, t_idx);

  SeriesIngredients ing;
  ing.adg.resize(t_idx);
  ing.ah.resize(t_idx);
  ing.gamma.resize(t_idx);
  ing.beta.resize(t_idx);
  for (int j = 0; j < t_idx; ++j) {
    auto [wbar_jt, w_jt] = contraction_weight(modes, trace.path, j, t_idx);
    auto [wbar_0j, w_0j] = contraction_weight(modes, trace.path, 0, j);
    VectorXc a_vec = kI * (wbar_jt.cwiseProduct(g) - u_minus[j]);
    VectorXc b_vec = kI * (w_0j.cwiseProduct(h) + trace.u_plus[j]);
    const MatrixXc& f = trace.snap(j).F;
    ing.adg[j] = VectorXc(s_ch);
    ing.ah[j] = VectorXc(s_ch);
    for (int s = 0; s < s_ch; ++s) {
      ing.adg[j][s] = inner_product(modes, a_vec, f.col(s));
      ing.ah[j][s] = inner_product(modes, f.col(s), b_vec);
    }
    // gamma_k = e^{-(t - t_j) omega_k} e^{-i m_k·X_j} F_s(X_j)_k
    // beta_k  = mu_k conj(F_s(X_j)_k) e^{+(t - t_j) omega_k} e^{+i m_k·X_j}
    ing.gamma[j] = MatrixXc(m, s_ch);
    ing.beta[j] = MatrixXc(m, s_ch);
    VectorXr mdx = modes.momentum() * VectorXr(trace.path.positions.row(j));
    const double dt_rem = t_final - trace.time(j);
    for (int k = 0; k < m; ++k) {
      const Complex decay = std::exp(Complex(-dt_rem * modes.omega()[k], -mdx[k]));
      const Complex grow = std::exp(Complex(dt_rem * modes.omega()[k], mdx[k]));
      for (int s = 0; s < s_ch; ++s) {
        ing.gamma[j](k, s) = decay * f(k, s);
        ing.beta[j](k, s) = modes.mu()[k] * std::conj(f(k, s)) * grow;
      }
    }
  }
  return ing;
}

}  // namespace

std::vector<PartitionTerm> partition_terms(int n) {
  if (n < 0) throw InputError("partition_terms: n >= 0 required");
  std::vector<PartitionTerm> out;
  std::vector<int8_t> kind(n, 0);
  // Enumerate 3^n assignments, then the pairings of each even-sized C set.
  const long total = static_cast<long>(std::pow(3.0, n));
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::vector<int> c_set;
    for (int i = 0; i < n; ++i) {
      kind[i] = static_cast<int8_t>(c % 3);
      if (kind[i] == 2) c_set.push_back(i);
      c /= 3;
    }
    if (c_set.size() % 2 != 0) continue;
    if (c_set.empty()) {
      out.push_back({kind, {}});
      continue;
    }
    std::vector<std::vector<std::pair<int, int>>> pairings;
    pairings_of(c_set, {}, pairings);
    for (auto& p : pairings) out.push_back({kind, p});
  }
  return out;
}

MatrixXc q_n(const VectorXc& g, const VectorXc& h, const std::vector<int>& time_idx,
             const BasicProcessTrace& trace, int t_idx) {
  const CouplingFamily& coupling = *trace.coupling;
  const ModeSpace& modes = *trace.modes;
  const int n = static_cast<int>(time_idx.size());
  const int l = coupling.spin_dim();
  const int s_ch = coupling.spin_channels();
  if (n == 0) return MatrixXc::Identity(l, l);
  for (int i = 0; i < n; ++i) {
    if (time_idx[i] > t_idx || time_idx[i] < 0)
      throw InputError("q_n: time indices must lie in [0, t_idx]");
    if (i > 0 && time_idx[i] < time_idx[i - 1])
      throw InputError("q_n: time indices must be ordered");
  }

  std::vector<VectorXc> u_minus = u_minus_row(trace, t_idx);
  // Per position and spin-channel scalars.
  MatrixXc adg(n, s_ch), ah(n, s_ch);
  for (int i = 0; i < n; ++i) {
    const int j = time_idx[i];
    auto [wbar_jt, w_jt] = contraction_weight(modes, trace.path, j, t_idx);
    auto [wbar_0j, w_0j] = contraction_weight(modes, trace.path, 0, j);
    VectorXc a_vec = kI * (wbar_jt.cwiseProduct(g) - u_minus[j]);
    VectorXc b_vec = kI * (w_0j.cwiseProduct(h) + trace.u_plus[j]);
    const MatrixXc& f = trace.snap(j).F;
    for (int s = 0; s < s_ch; ++s) {
      adg(i, s) = inner_product(modes, a_vec, f.col(s));
      ah(i, s) = inner_product(modes, f.col(s), b_vec);
    }
  }
  // Pair kernels for i < i'.
  std::vector<std::vector<MatrixXc>> pairf(n, std::vector<MatrixXc>(n));
  for (int i = 0; i < n; ++i) {
    for (int ip = i + 1; ip < n; ++ip) {
      auto [wbar, w] = contraction_weight(modes, trace.path, time_idx[i], time_idx[ip]);
      const MatrixXc& fi = trace.snap(time_idx[i]).F;
      const MatrixXc& fip = trace.snap(time_idx[ip]).F;
      MatrixXc pf(s_ch, s_ch);  // (s at i, s' at i')
      for (int s = 0; s < s_ch; ++s)
        for (int sp = 0; sp < s_ch; ++sp)
          pf(s, sp) = inner_product(modes, fip.col(sp), VectorXc(w.cwiseProduct(fi.col(s))));
      pairf[i][ip] = std::move(pf);
    }
  }

  MatrixXc result = MatrixXc::Zero(l, l);
  std::vector<int> alpha(n, 0);
  const auto& sigma = coupling.spin_matrices();
  for (const auto& term : partition_terms(n)) {
    // Fused alpha loop: odometer over [S]^n.
    std::fill(alpha.begin(), alpha.end(), 0);
    while (true) {
      Complex factor = 1.0;
      for (int i = 0; i < n; ++i) {
        if (term.kind[i] == 0) factor *= adg(i, alpha[i]);
        else if (term.kind[i] == 1) factor *= ah(i, alpha[i]);
      }
      for (const auto& [c, cp] : term.pairs) factor *= pairf[c][cp](alpha[c], alpha[cp]);
      if (factor != Complex(0.0)) {
        MatrixXc prod = MatrixXc::Identity(l, l);
        for (int i = 0; i < n; ++i) prod = sigma[alpha[i]] * prod;
        result += factor * prod;
      }
      int pos = 0;
      while (pos < n && ++alpha[pos] == s_ch) alpha[pos++] = 0;
      if (pos == n) break;
    }
  }
  return result;
}

SeriesResult series_matrix_element(const VectorXc& g, const VectorXc& h,
                                   const BasicProcessTrace& trace, int t_idx, int n_max) {
  const CouplingFamily& coupling = *trace.coupling;
  const ModeSpace& modes = *trace.modes;
  const int l = coupling.spin_dim();
  const int s_ch = coupling.spin_channels();
  const int m = modes.mode_count();
  if (n_max < 0) throw InputError("series: n_max >= 0 required");

  SeriesIngredients ing = build_ingredients(g, h, trace, t_idx);
  const auto& sigma = coupling.spin_matrices();

  // Transfer recursion over grid positions. State: (indices placed, open-pair
  // mode multiset); value: L x L matrix accumulating the sigma products.
  // Key layout: [n_used, count_mode_0, ..., count_mode_{M-1}].
  using Key = std::vector<int>;
  std::map<Key, MatrixXc> states;
  Key root(m + 1, 0);
  states[root] = MatrixXc::Identity(l, l);
  const int max_open = n_max / 2;

  for (int j = 0; j < t_idx; ++j) {
    const double dt = trace.path.grid.dt(j);
    std::map<Key, MatrixXc> next = states;  // skip transition
    for (const auto& [key, val] : states) {
      const int used = key[0];
      int open = 0;
      for (int k = 0; k < m; ++k) open += key[1 + k];
      Key grown = key;
      grown[0] = used + 1;
      // A or B placement: used+1 placed, still `open` closings pending.
      if (used + 1 + open <= n_max) {
        MatrixXc add = MatrixXc::Zero(l, l);
        for (int s = 0; s < s_ch; ++s)
          add += (dt * (ing.adg[j][s] + ing.ah[j][s])) * (sigma[s] * val);
        auto [it, inserted] = next.try_emplace(grown, add);
        if (!inserted) it->second += add;
      }
      // Open a pair: its closing index is committed as well.
      if (open < max_open && used + open + 2 <= n_max) {
        for (int k = 0; k < m; ++k) {
          Key opened = grown;
          opened[1 + k] += 1;
          MatrixXc add = MatrixXc::Zero(l, l);
          for (int s = 0; s < s_ch; ++s) {
            const Complex w = dt * ing.gamma[j](k, s);
            if (w != Complex(0.0)) add += w * (sigma[s] * val);
          }
          if (add.cwiseAbs().maxCoeff() == 0.0) continue;
          auto [it, inserted] = next.try_emplace(opened, add);
          if (!inserted) it->second += add;
        }
      }
      // Close one of the open pairs (any of the key[1+k] in mode k).
      if (used + open <= n_max) {
        for (int k = 0; k < m; ++k) {
          if (key[1 + k] == 0) continue;
          Key closed = grown;
          closed[1 + k] -= 1;
          const double mult = key[1 + k];
          MatrixXc add = MatrixXc::Zero(l, l);
          for (int s = 0; s < s_ch; ++s) {
            const Complex w = mult * dt * ing.beta[j](k, s);
            if (w != Complex(0.0)) add += w * (sigma[s] * val);
          }
          auto [it, inserted] = next.try_emplace(closed, add);
          if (!inserted) it->second += add;
        }
      }
    }
    states = std::move(next);
  }

  SeriesResult res;
  res.orders.assign(n_max + 1, MatrixXc::Zero(l, l));
  res.orders[0] = MatrixXc::Identity(l, l);
  for (const auto& [key, val] : states) {
    bool closed = true;
    for (int k = 0; k < m; ++k)
      if (key[1 + k] != 0) closed = false;
    if (!closed || key[0] == 0) continue;
    if (key[0] <= n_max) res.orders[key[0]] += val;
  }
  res.q_total = MatrixXc::Zero(l, l);
  res.order_norms.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    res.q_total += res.orders[n];
    res.order_norms[n] = res.orders[n].norm();
  }
  ScalarKernelSample sample = make_scalar_sample(trace, t_idx);
  res.scalar_prefactor = matrix_element(sample, g, h);
  res.value = res.scalar_prefactor * res.q_total;
  return res;
}

SeriesResult series_matrix_element_enumerated(const VectorXc& g, const VectorXc& h,
                                              const BasicProcessTrace& trace, int t_idx,
                                              int n_max) {
  const CouplingFamily& coupling = *trace.coupling;
  const int l = coupling.spin_dim();
  SeriesResult res;
  res.orders.assign(n_max + 1, MatrixXc::Zero(l, l));
  res.orders[0] = MatrixXc::Identity(l, l);
  for (int n = 1; n <= n_max; ++n) {
    // All strictly increasing index tuples in [0, t_idx).
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    if (n > t_idx) break;
    while (true) {
      double wgt = 1.0;
      for (int i = 0; i < n; ++i) wgt *= trace.path.grid.dt(idx[i]);
      res.orders[n] += wgt * q_n(g, h, idx, trace, t_idx);
      int pos = n - 1;
      while (pos >= 0 && idx[pos] == t_idx - n + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < n; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  res.q_total = MatrixXc::Zero(l, l);
  res.order_norms.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    res.q_total += res.orders[n];
    res.order_norms[n] = res.orders[n].norm();
  }
  ScalarKernelSample sample = make_scalar_sample(trace, t_idx);
  res.scalar_prefactor = matrix_element(sample, g, h);
  res.value = res.scalar_prefactor * res.q_total;
  return res;
}

}  // namespace fkmc
