#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "kcut/cutsim.hpp"
#include "kcut/ks.hpp"

namespace kcut::harness {

// frac(lg n - lg lg n)
double size_phase(double n);

// Sizes in [n_min, n_max] whose phase is within delta (circularly) of gamma.
// There is one candidate per unit step of lg n - lg lg n; when more than
// `count` exist, the ones nearest to `count` geometrically spaced targets are kept.
std::vector<std::uint64_t> subsequence_select(double gamma, std::uint64_t n_min,
                                              std::uint64_t n_max, int count,
                                              double delta = 0.02);

struct ExperimentConfig {
  int k = 1;
  int r = 1;
  bool total = false;  // pool all record orders
  cutsim::Variant variant = cutsim::Variant::node;
  double gamma_target = 0.0;
  double delta = 0.02;
  std::vector<std::uint64_t> n_list;
  std::uint64_t n_min = 0;
  std::uint64_t n_max = 0;
  int count = 0;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: KCUT_THREADS or hardware concurrency
  double mean_sigmas = 4.0;
  std::string csv_path;
  std::string json_path;
  std::string samples_csv_path;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct SizeResult {
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  double gamma_n = 0.0;
  bool gamma_ambiguous = false;  // phase sits on 0 ≡ 1
  std::uint64_t samples = 0;
  double mean_raw = 0.0;
  double var_raw = 0.0;
  double mean_rescaled = 0.0;
  double var_rescaled = 0.0;
  double ks = 0.0;
  double inversion_error = 0.0;
  double exact_mean = 0.0;
  double mean_z = 0.0;
  bool mean_ok = true;
  std::vector<double> raw;
  std::vector<double> rescaled;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SizeResult> sizes;
  std::vector<std::string> warnings;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

std::string summary_csv(const ExperimentReport& report);
std::string samples_csv(const ExperimentReport& report);
std::string report_json(const ExperimentReport& report);

// Writes whichever output paths the config names.
void write_outputs(const ExperimentReport& report);

}  // namespace kcut::harness
