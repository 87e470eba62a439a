#pragma once

#include "rkhs/kernel.hpp"
#include "rkhs/sampling.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace rkhs {

enum class Experiment { PhaseDiagram, Greedy, Zstat, LogdetCompare };

Experiment parse_experiment(std::string_view name);
std::string_view experiment_name(Experiment experiment);

struct ExperimentConfig {
  Experiment experiment = Experiment::PhaseDiagram;
  KernelVariant kernel = KernelVariant::H1Uniform;
  double truncation = 10.0;
  std::vector<int> d_values{2, 3, 4, 5, 6, 7, 8, 9, 10};
  /// Sample sizes; empty means 1..4d for each d (phase diagram) or n = d.
  std::vector<int> n_values;
  int trials = 50;
  double mu_star = 2.0;
  std::vector<std::string> methods{"christoffel", "cvs", "sivs"};
  std::uint64_t seed = 0;
  std::string output;
  SamplerConfig sampler;
  int candidates = 100;  // greedy study pool size
  int steps = 20;        // greedy study steps
  int threads = 0;       // 0 means hardware concurrency

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  std::vector<int> sizes_for(int d) const;
};

/// Applies the fields present in a JSON object to `config`.
void apply_json(ExperimentConfig& config, std::string_view json_text);
ExperimentConfig load_config(const std::string& path, Experiment fallback);
std::string config_json(const ExperimentConfig& config);

/// "3", "2:10" (inclusive range) or "4,6,8".
std::vector<int> parse_int_list(std::string_view text);
std::vector<std::string> parse_name_list(std::string_view text);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const;
};

/// 17 significant digits, locale independent; "inf", "-inf" and "nan" spelled out.
std::string format_number(double value);

/// Runs fn(0..count-1) on `threads` workers; fn must only touch its own slot.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// Draws n points with "christoffel", "cvs" or "sivs" (fixed size).
std::vector<double> draw_points(const SamplingGrid& grid, std::string_view method, int n, Rng& rng,
                                int gibbs_sweeps);

/// Columns: method, d, n, trials, successes.
Table run_phase_diagram(const ExperimentConfig& config);
/// Columns: rep, step, eta, mu. Uses the first entry of d_values.
Table run_greedy_study(const ExperimentConfig& config);
/// Columns: rep, i, z. First-stage normalisers of SIVS, first entry of d_values.
Table run_zstat(const ExperimentConfig& config);
/// Columns: method, rep, logdet_g. Methods "sivs" and "iid_marginal"; the
/// latter draws i.i.d. from a histogram of the pooled SIVS coordinates.
Table run_logdet_compare(const ExperimentConfig& config);

Table run_experiment(const ExperimentConfig& config);

struct MeanComparison {
  double mean_a, se_a;
  double mean_b, se_b;
  double difference;  // mean_a - mean_b
  double pooled_se;   // sqrt(se_a^2 + se_b^2)
};

/// Summary of a logdet-compare table, a = sivs, b = iid_marginal.
MeanComparison summarize_logdet(const Table& table);

/// Writes table.csv() to `path` and a JSON sidecar `path + ".json"` with the
/// config echo and run metadata.
void write_outputs(const ExperimentConfig& config, const Table& table, const std::string& path);

}  // namespace rkhs
