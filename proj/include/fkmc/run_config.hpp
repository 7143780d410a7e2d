#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fkmc/basic_processes.hpp"

namespace fkmc {

/// Model preset selection and parameters, parsed from the JSON config.
struct ModelConfig {
  std::string preset = "nelson";  // nelson | nrqed | csv
  // nelson: explicit mode data
  std::vector<double> mu, omega;
  std::vector<std::vector<double>> momentum;     // per mode, nu entries
  std::vector<int> conj_partner;                 // optional involution (default identity)
  std::vector<double> form_factor_re, form_factor_im;
  bool translation_covariant = false;
  // nrqed
  double cutoff = 1.0;
  double alpha = 1.0;
  std::vector<std::vector<double>> k_grid;       // rows of k_x k_y k_z weight
  // csv
  std::string mode_file;
};

struct PotentialConfig {
  std::string kind = "none";             // none | polynomial | tabulated
  std::vector<double> coefficients;      // c_j for sum_j c_j |x|^{2j}
  std::string table_file;                // two-column CSV (x, V), nu = 1 only
};

struct RunConfig {
  std::string command;
  ModelConfig model;
  PotentialConfig potential;
  int max_bosons = 4;
  int steps = 64;
  double horizon = 0.5;
  bool refine_towards_end = false;
  std::vector<double> xi;
  std::vector<double> g_re, g_im, h_re, h_im;  // coherent parameters per mode
  long n_paths = 1000;
  std::uint64_t master_seed = 1;
  int workers = 1;
  bool antithetic = false;
  int series_n_max = 4;
  std::string scheme = "splitting";  // splitting | euler
  std::string out_dir = "fkmc-out";
  bool dump_paths = false;

  // parsing / validation / canonical serialization
  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
  std::string to_json_text() const;  // canonical echo (sorted keys)
  std::uint64_t content_hash() const;
  void validate() const;

  std::shared_ptr<const CouplingFamily> build_coupling() const;
  Potential build_potential() const;
  VectorXc g_vector(int mode_count) const;
  VectorXc h_vector(int mode_count) const;
  VectorXr xi_vector(int nu) const;
};

/// Mode data loader: CSV with columns mode_id, mu, omega, m_1..m_nu, then
/// optional G_re_l/G_im_l per space dimension and F_re_j/F_im_j per spin
/// channel, plus an optional conj_partner column.
std::shared_ptr<const CouplingFamily> load_mode_csv(const std::string& path);

/// FNV-1a over a string (content hash for config echoes).
std::uint64_t fnv1a(const std::string& text);

}  // namespace fkmc
