#pragma once

#include "streamcode/channel.hpp"
#include "streamcode/code.hpp"
#include "streamcode/decode.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace streamcode::sim {

enum class Model
{
  ge,
  fritchman,
};

std::string_view to_string(Model m);
Model parse_model(std::string_view name);

inline constexpr std::uint64_t k_default_seed = 20240611;
inline constexpr std::size_t k_min_channel_length = 10000;

struct ExperimentConfig
{
  std::vector<CodeDescriptor> codes;
  Model model = Model::ge;
  double alpha = 5e-4;
  double beta = 0.5;
  /// Total chain states: 2 for Gilbert-Elliott, N+1 for Fritchman.
  int n_states = 2;
  std::vector<double> eps_grid;
  std::size_t channel_length = 1000000;
  int trials = 1;
  std::uint64_t master_seed = k_default_seed;
  unsigned field_m = 16;
  unsigned jobs = 1;

  void validate() const;
};

/// 10 log-spaced points in [1e-3, 2e-2].
std::vector<double> default_eps_grid();

/// Seeds derived from the master seed. Traces share a seed across epsilon,
/// so every epsilon sees the same burst process.
std::uint64_t trace_seed(std::uint64_t master, int trial);
std::uint64_t source_seed(std::uint64_t master, int trial);
/// The descriptor's own seed if it has one, else a hash of its text.
std::uint64_t code_seed(std::uint64_t master, const CodeDescriptor& code);

/// Code with its seed and field resolved against the config.
CodeSpec resolve_code(const ExperimentConfig& config, const CodeDescriptor& code);

channel::ErasureTrace make_trace(const ExperimentConfig& config, double epsilon, int trial);

struct SimRow
{
  double epsilon = 0;
  CodeParams params;
  std::string code;
  Rational rate;
  decode::LossReport coded;
  std::uint64_t uncoded_lost = 0;
  double uncoded_loss = 0;
  double coded_loss = 0;
  double stderr_loss = 0; ///< binomial standard error of coded_loss
  std::uint64_t bursts_observed = 0;
  std::size_t max_burst = 0;
  double runtime_seconds = 0;
};

struct SimReport
{
  ExperimentConfig config;
  std::vector<SimRow> rows; ///< epsilon-major, codes in config order
  /// Bursts of the epsilon = 0 trace of trial 0 (the pure state process).
  channel::BurstHistogram histogram;
};

SimReport run_experiment(const ExperimentConfig& config);

/// Loss CSV body (header row plus one row per (code, epsilon)).
std::string loss_csv(const SimReport& report);
/// burst_length,count,expected_pmf for a channel's histogram.
std::string histogram_csv(const channel::BurstHistogram& histogram, Model model, int n_states, double beta);

struct BundleOptions
{
  std::uint64_t seed = k_default_seed;
  std::size_t length = 0; ///< 0 = bundle default (desk scale)
  bool full = false;      ///< 1e7 steps for ge_t12, 1e8 otherwise
  int trials = 1;
  unsigned jobs = 1;
  std::vector<double> eps_grid; ///< empty = default grid
};

struct BundleFile
{
  std::string name;
  std::string body; ///< CSV without comment header
};

std::vector<std::string> bundle_names();
/// Config behind a named loss-curve bundle. Throws UsageError for unknown
/// names and for "tradeoff", which has no channel.
ExperimentConfig bundle_config(std::string_view name, const BundleOptions& options);
std::vector<BundleFile> figure_bundle(std::string_view name, const BundleOptions& options);

/// Tradeoff CSV for R in {1/2, 3/5, 7/10} at the given delay.
std::string tradeoff_csv(const std::vector<Rational>& rates, int T);

} // namespace streamcode::sim
