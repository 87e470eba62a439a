#include "rkhs/bench.hpp"

#include "rkhs/density.hpp"
#include "rkhs/gramian.hpp"
#include "rkhs/subsample.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace rkhs {
namespace {

using nlohmann::json;

struct Models {
  std::unique_ptr<SubspaceModel> subspace;
  std::unique_ptr<SamplingGrid> grid;
};

Models build_models(const ExperimentConfig& config, int d) {
  const KernelModel kernel(config.kernel, config.truncation);
  Models m;
  m.subspace = std::make_unique<SubspaceModel>(kernel, SubspaceSpec::standard(config.kernel, d));
  m.grid = std::make_unique<SamplingGrid>(*m.subspace, config.sampler.grid_size);
  return m;
}

std::uint64_t cell_seed(const ExperimentConfig& config, std::string_view method, int d, int n,
                        int trial) {
  return stream_seed(config.seed, {hash_name(method), static_cast<std::uint64_t>(d),
                                   static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial)});
}

double mu_of(const SubspaceModel& sub, const std::vector<double>& points) {
  SampleState state(sub);
  for (double p : points) state.extend(p);
  return state.mu();
}

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return std::string(s.substr(a, b - a + 1));
}

int parse_int(std::string_view s) {
  const std::string t = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument("expected an integer, got '" + t + "'");
  }
  return v;
}

}  // namespace

Experiment parse_experiment(std::string_view name) {
  if (name == "phase_diagram" || name == "phase-diagram") return Experiment::PhaseDiagram;
  if (name == "greedy" || name == "greedy_study") return Experiment::Greedy;
  if (name == "zstat") return Experiment::Zstat;
  if (name == "logdet_compare" || name == "logdet-compare") return Experiment::LogdetCompare;
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

std::string_view experiment_name(Experiment experiment) {
  switch (experiment) {
    case Experiment::PhaseDiagram: return "phase_diagram";
    case Experiment::Greedy: return "greedy_study";
    case Experiment::Zstat: return "zstat";
    case Experiment::LogdetCompare: return "logdet_compare";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (d_values.empty()) throw std::invalid_argument("d range is empty");
  for (int d : d_values) {
    if (d < 1) throw std::invalid_argument("d must be positive");
  }
  for (int n : n_values) {
    if (n < 1) throw std::invalid_argument("n must be positive");
  }
  if (!(mu_star > 1.0)) throw std::invalid_argument("mu_star must exceed 1");
  if (methods.empty()) throw std::invalid_argument("method list is empty");
  for (const std::string& m : methods) {
    if (m != "christoffel" && m != "cvs" && m != "sivs") {
      throw std::invalid_argument("unknown method '" + m + "'");
    }
  }
  if (!(truncation > 0.0)) throw std::invalid_argument("truncation must be positive");
  if (candidates < 1 || steps < 1) throw std::invalid_argument("candidates and steps must be positive");
  SamplerConfig s = sampler;
  s.mu_star = mu_star;
  for (int d : d_values) s.validate(d);
}

std::vector<int> ExperimentConfig::sizes_for(int d) const {
  if (!n_values.empty()) return n_values;
  std::vector<int> out;
  for (int n = 1; n <= 4 * d; ++n) out.push_back(n);
  return out;
}

void apply_json(ExperimentConfig& c, std::string_view json_text) {
  const json j = json::parse(json_text);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  auto ints = [](const json& v) {
    if (v.is_number_integer()) return std::vector<int>{v.get<int>()};
    if (v.is_string()) return parse_int_list(v.get<std::string>());
    return v.get<std::vector<int>>();
  };
  if (j.contains("experiment")) c.experiment = parse_experiment(j["experiment"].get<std::string>());
  if (j.contains("kernel")) c.kernel = parse_kernel_variant(j["kernel"].get<std::string>());
  if (j.contains("truncation")) c.truncation = j["truncation"].get<double>();
  if (j.contains("d")) c.d_values = ints(j["d"]);
  if (j.contains("n")) c.n_values = ints(j["n"]);
  if (j.contains("trials")) c.trials = j["trials"].get<int>();
  if (j.contains("mu_star")) c.mu_star = j["mu_star"].get<double>();
  if (j.contains("methods")) {
    c.methods = j["methods"].is_string() ? parse_name_list(j["methods"].get<std::string>())
                                         : j["methods"].get<std::vector<std::string>>();
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out")) c.output = j["out"].get<std::string>();
  if (j.contains("grid_size")) c.sampler.grid_size = j["grid_size"].get<int>();
  if (j.contains("max_points")) c.sampler.max_points = j["max_points"].get<int>();
  if (j.contains("gibbs_sweeps")) c.sampler.gibbs_sweeps = j["gibbs_sweeps"].get<int>();
  if (j.contains("candidates")) c.candidates = j["candidates"].get<int>();
  if (j.contains("steps")) c.steps = j["steps"].get<int>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
}

ExperimentConfig load_config(const std::string& path, Experiment fallback) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ExperimentConfig c;
  c.experiment = fallback;
  apply_json(c, text);
  return c;
}

std::string config_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = experiment_name(c.experiment);
  j["kernel"] = kernel_name(c.kernel);
  j["truncation"] = c.truncation;
  j["d"] = c.d_values;
  j["n"] = c.n_values;
  j["trials"] = c.trials;
  j["mu_star"] = c.mu_star;
  j["methods"] = c.methods;
  j["seed"] = c.seed;
  j["out"] = c.output;
  j["grid_size"] = c.sampler.grid_size;
  j["max_points"] = c.sampler.max_points;
  j["gibbs_sweeps"] = c.sampler.gibbs_sweeps;
  j["candidates"] = c.candidates;
  j["steps"] = c.steps;
  j["threads"] = c.threads;
  return j.dump(2);
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item = text.substr(start, comma - start);
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) {
      out.push_back(parse_int(item));
    } else {
      const int lo = parse_int(item.substr(0, colon));
      const int hi = parse_int(item.substr(colon + 1));
      if (hi < lo) throw std::invalid_argument("empty range '" + std::string(item) + "'");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> parse_name_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = trim(text.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

std::string Table::csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(count, 1));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> draw_points(const SamplingGrid& grid, std::string_view method, int n, Rng& rng,
                                int gibbs_sweeps) {
  if (method == "christoffel") return sample_christoffel_iid(grid, n, rng);
  if (method == "cvs") return sample_cvs(grid, n, rng, gibbs_sweeps);
  if (method == "sivs") return sample_sivs_fixed(grid, n, rng).points;
  throw std::invalid_argument("unknown method '" + std::string(method) + "'");
}

Table run_phase_diagram(const ExperimentConfig& config) {
  config.validate();
  std::vector<Models> models;
  for (int d : config.d_values) models.push_back(build_models(config, d));

  struct Cell {
    std::string method;
    int di, d, n;
  };
  std::vector<Cell> cells;
  for (const std::string& method : config.methods) {
    for (std::size_t di = 0; di < config.d_values.size(); ++di) {
      const int d = config.d_values[di];
      for (int n : config.sizes_for(d)) cells.push_back({method, static_cast<int>(di), d, n});
    }
  }
  const int trials = config.trials;
  std::vector<char> success(cells.size() * trials, 0);
  parallel_for(static_cast<int>(success.size()), config.threads, [&](int task) {
    const Cell& c = cells[task / trials];
    const int trial = task % trials;
    const Models& m = models[c.di];
    if (c.n < c.d) return;  // mu is infinite below d points
    Rng rng(cell_seed(config, c.method, c.d, c.n, trial));
    const std::vector<double> x =
        draw_points(*m.grid, c.method, c.n, rng, config.sampler.gibbs_sweeps);
    success[task] = mu_of(*m.subspace, x) <= config.mu_star;
  });

  Table table{{"method", "d", "n", "trials", "successes"}, {}};
  for (std::size_t i = 0; i < cells.size(); ++i) {
    int s = 0;
    for (int t = 0; t < trials; ++t) s += success[i * trials + t];
    table.rows.push_back({cells[i].method, std::to_string(cells[i].d), std::to_string(cells[i].n),
                          std::to_string(trials), std::to_string(s)});
  }
  return table;
}

Table run_greedy_study(const ExperimentConfig& config) {
  config.validate();
  const int d = config.d_values.front();
  const Models m = build_models(config, d);
  std::vector<GreedyTrace> traces(config.trials);
  parallel_for(config.trials, config.threads, [&](int rep) {
    Rng rng(cell_seed(config, "greedy", d, config.candidates, rep));
    const std::vector<double> pool = sample_christoffel_iid(*m.grid, config.candidates, rng);
    GreedyOptions options;
    options.mu_star = config.mu_star;
    options.max_steps = config.steps;
    options.stop_at_mu_star = false;
    traces[rep] = greedy_subsample(*m.subspace, pool, options);
  });
  Table table{{"rep", "step", "eta", "mu"}, {}};
  for (int rep = 0; rep < config.trials; ++rep) {
    for (std::size_t s = 0; s < traces[rep].eta.size(); ++s) {
      table.rows.push_back({std::to_string(rep), std::to_string(s + 1),
                            format_number(traces[rep].eta[s]), format_number(traces[rep].mu[s])});
    }
  }
  return table;
}

Table run_zstat(const ExperimentConfig& config) {
  config.validate();
  const int d = config.d_values.front();
  const Models m = build_models(config, d);
  std::vector<SivsResult> runs(config.trials);
  parallel_for(config.trials, config.threads, [&](int rep) {
    Rng rng(cell_seed(config, "zstat", d, d, rep));
    runs[rep] = sample_sivs_fixed(*m.grid, d, rng);
  });
  Table table{{"rep", "i", "z"}, {}};
  for (int rep = 0; rep < config.trials; ++rep) {
    for (const SivsStep& s : runs[rep].trace) {
      table.rows.push_back({std::to_string(rep), std::to_string(s.index), format_number(s.z)});
    }
  }
  return table;
}

Table run_logdet_compare(const ExperimentConfig& config) {
  config.validate();
  const int d = config.d_values.front();
  const int n = config.n_values.empty() ? d : config.n_values.front();
  const Models m = build_models(config, d);
  const int reps = config.trials;

  auto logdet_of = [&](const std::vector<double>& x) {
    SampleState state(*m.subspace);
    for (double p : x) state.extend(p);
    return state.logdet_gramian();
  };

  std::vector<std::vector<double>> sivs(reps);
  std::vector<double> sivs_logdet(reps);
  parallel_for(reps, config.threads, [&](int rep) {
    Rng rng(cell_seed(config, "sivs", d, n, rep));
    sivs[rep] = sample_sivs_fixed(*m.grid, n, rng).points;
    sivs_logdet[rep] = logdet_of(sivs[rep]);
  });

  // Histogram of the pooled coordinates, linear between bin centres.
  std::vector<double> pool;
  for (const auto& x : sivs) pool.insert(pool.end(), x.begin(), x.end());
  const auto [pmin, pmax] = std::minmax_element(pool.begin(), pool.end());
  const int bins = std::max(10, static_cast<int>(std::lround(std::sqrt(pool.size()))));
  double lo = m.subspace->kernel().lower();
  double hi = m.subspace->kernel().upper();
  if (config.kernel == KernelVariant::H1Gauss) {
    const double pad = (*pmax - *pmin) / bins;
    lo = *pmin - pad;
    hi = *pmax + pad;
  }
  std::vector<double> counts(bins, 0.0);
  for (double p : pool) {
    const int b = std::clamp(static_cast<int>((p - lo) / (hi - lo) * bins), 0, bins - 1);
    counts[b] += 1.0;
  }
  std::vector<double> nodes{lo}, values{counts.front()};
  for (int b = 0; b < bins; ++b) {
    nodes.push_back(lo + (b + 0.5) * (hi - lo) / bins);
    values.push_back(counts[b]);
  }
  nodes.push_back(hi);
  values.push_back(counts.back());
  const GridDensity marginal(nodes, values);

  std::vector<double> iid_logdet(reps);
  parallel_for(reps, config.threads, [&](int rep) {
    Rng rng(cell_seed(config, "iid_marginal", d, n, rep));
    std::vector<double> x(n);
    for (double& v : x) v = marginal.draw(rng);
    iid_logdet[rep] = logdet_of(x);
  });

  Table table{{"method", "rep", "logdet_g"}, {}};
  for (int rep = 0; rep < reps; ++rep) {
    table.rows.push_back({"sivs", std::to_string(rep), format_number(sivs_logdet[rep])});
  }
  for (int rep = 0; rep < reps; ++rep) {
    table.rows.push_back({"iid_marginal", std::to_string(rep), format_number(iid_logdet[rep])});
  }
  return table;
}

Table run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case Experiment::PhaseDiagram: return run_phase_diagram(config);
    case Experiment::Greedy: return run_greedy_study(config);
    case Experiment::Zstat: return run_zstat(config);
    case Experiment::LogdetCompare: return run_logdet_compare(config);
  }
  throw std::invalid_argument("unknown experiment");
}

MeanComparison summarize_logdet(const Table& table) {
  std::vector<double> a, b;
  for (const auto& row : table.rows) {
    const double v = std::stod(row.at(2));
    (row.at(0) == "sivs" ? a : b).push_back(v);
  }
  auto stats = [](const std::vector<double>& v) {
    if (v.size() < 2) throw std::invalid_argument("summarize_logdet: need two values per method");
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(ss / (v.size() - 1) / v.size())};
  };
  const auto [ma, sa] = stats(a);
  const auto [mb, sb] = stats(b);
  return {ma, sa, mb, sb, ma - mb, std::sqrt(sa * sa + sb * sb)};
}

void write_outputs(const ExperimentConfig& config, const Table& table, const std::string& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << table.csv();
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
  }
  json meta;
  meta["config"] = json::parse(config_json(config));
  meta["metadata"] = {{"generator", "rkhs_bench"},
                      {"version", "1.0.0"},
                      {"experiment", experiment_name(config.experiment)},
                      {"columns", table.header},
                      {"rows", table.rows.size()}};
  if (config.experiment == Experiment::LogdetCompare) {
    const MeanComparison s = summarize_logdet(table);
    meta["summary"] = {{"sivs_mean", s.mean_a},         {"sivs_se", s.se_a},
                       {"iid_marginal_mean", s.mean_b}, {"iid_marginal_se", s.se_b},
                       {"difference", s.difference},    {"pooled_se", s.pooled_se}};
  }
  std::ofstream side(path + ".json", std::ios::binary);
  if (!side) throw std::runtime_error("cannot write '" + path + ".json'");
  side << meta.dump(2) << '\n';
}

}  // namespace rkhs
