#include "streamcode/sim.hpp"

#include "streamcode/csv.hpp"
#include "streamcode/errors.hpp"
#include "streamcode/metrics.hpp"
#include "streamcode/rng.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace streamcode::sim {

std::string_view to_string(Model m)
{
  return m == Model::ge ? "ge" : "fritchman";
}

Model parse_model(std::string_view name)
{
  if (name == "ge") {
    return Model::ge;
  }
  if (name == "fritchman") {
    return Model::fritchman;
  }
  throw UsageError("unknown channel model '" + std::string(name) + "' (expected ge or fritchman)");
}

void ExperimentConfig::validate() const
{
  if (codes.empty()) {
    throw ParameterError("experiment needs at least one code");
  }
  if (channel_length < k_min_channel_length) {
    throw ParameterError("channel length must be at least " + std::to_string(k_min_channel_length));
  }
  if (trials < 1) {
    throw ParameterError("trials must be >= 1");
  }
  if (eps_grid.empty()) {
    throw ParameterError("epsilon grid is empty");
  }
  for (double e : eps_grid) {
    if (!(e > 0 && e < 1)) {
      throw ParameterError("epsilon values must lie in (0, 1)");
    }
  }
  if (model == Model::ge && n_states != 2) {
    throw ParameterError("Gilbert-Elliott model has exactly 2 states");
  }
  if (model == Model::fritchman && n_states < 2) {
    throw ParameterError("Fritchman model needs at least 2 states");
  }
  channel::FritchmanParams{n_states - 1, alpha, beta, 0.0}.validate();
}

std::vector<double> default_eps_grid()
{
  std::vector<double> grid;
  const double lo = std::log(1e-3);
  const double hi = std::log(2e-2);
  for (int i = 0; i < 10; ++i) {
    grid.push_back(std::exp(lo + (hi - lo) * i / 9.0));
  }
  grid.front() = 1e-3;
  grid.back() = 2e-2;
  return grid;
}

std::uint64_t trace_seed(std::uint64_t master, int trial)
{
  return rng::derive(master, "trace", static_cast<std::uint64_t>(trial));
}

std::uint64_t source_seed(std::uint64_t master, int trial)
{
  return rng::derive(master, "source", static_cast<std::uint64_t>(trial));
}

std::uint64_t code_seed(std::uint64_t master, const CodeDescriptor& code)
{
  if (code.has_seed) {
    return code.params.seed;
  }
  return rng::derive(master, "code", rng::fnv1a(descriptor(code.params)));
}

CodeSpec resolve_code(const ExperimentConfig& config, const CodeDescriptor& code)
{
  CodeParams p = code.params;
  p.seed = code_seed(config.master_seed, code);
  p.field_m = config.field_m;
  return build(p);
}

channel::ErasureTrace make_trace(const ExperimentConfig& config, double epsilon, int trial)
{
  const std::uint64_t seed = trace_seed(config.master_seed, trial);
  if (config.model == Model::ge) {
    return channel::ge_trace({config.alpha, config.beta, epsilon}, config.channel_length, seed);
  }
  return channel::fritchman_trace({config.n_states - 1, config.alpha, config.beta, epsilon}, config.channel_length,
                                  seed);
}

namespace {

template <class Work>
void parallel_for(std::size_t count, unsigned jobs, Work&& work)
{
  const unsigned workers = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      work(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        work(i);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

} // namespace

SimReport run_experiment(const ExperimentConfig& config)
{
  config.validate();
  SimReport report;
  report.config = config;
  std::vector<CodeSpec> codes;
  for (const auto& c : config.codes) {
    codes.push_back(resolve_code(config, c));
  }
  const std::size_t n_codes = codes.size();
  report.rows.resize(config.eps_grid.size() * n_codes);
  for (std::size_t e = 0; e < config.eps_grid.size(); ++e) {
    for (std::size_t c = 0; c < n_codes; ++c) {
      auto& row = report.rows[e * n_codes + c];
      row.epsilon = config.eps_grid[e];
      row.params = codes[c].params();
      row.code = label(codes[c].params());
      row.rate = codes[c].rate();
    }
  }

  std::uint64_t counted = 0;
  for (int trial = 0; trial < config.trials; ++trial) {
    if (trial == 0) {
      report.histogram = channel::burst_histogram(make_trace(config, 0.0, 0));
    }
    const std::uint64_t src = source_seed(config.master_seed, trial);
    for (std::size_t e = 0; e < config.eps_grid.size(); ++e) {
      const auto trace = make_trace(config, config.eps_grid[e], trial);
      const auto summary = channel::summarize(channel::burst_histogram(trace));
      const std::uint64_t lost = trace.erasures();
      parallel_for(n_codes, config.jobs, [&](std::size_t c) {
        const auto t0 = std::chrono::steady_clock::now();
        decode::RunOptions options;
        options.source_seed = src;
        const auto result = decode::run(codes[c], trace, options);
        auto& row = report.rows[e * n_codes + c];
        row.coded += result;
        row.uncoded_lost += lost;
        row.bursts_observed += summary.bursts;
        row.max_burst = std::max(row.max_burst, summary.max_length);
        row.runtime_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      });
    }
    counted += config.channel_length;
  }
  for (auto& row : report.rows) {
    const double n = static_cast<double>(counted);
    row.uncoded_loss = static_cast<double>(row.uncoded_lost) / n;
    row.coded_loss = row.coded.loss_fraction();
    row.stderr_loss = std::sqrt(row.coded_loss * (1 - row.coded_loss) / n);
  }
  return report;
}

std::string loss_csv(const SimReport& report)
{
  const auto& c = report.config;
  std::string out = csv::row({"model", "alpha", "beta", "n_states", "epsilon", "code", "u", "v", "delta", "T", "R_num",
                              "R_den", "channel_len", "master_seed", "uncoded_loss", "coded_loss", "stderr",
                              "bursts_observed", "max_burst"});
  for (const auto& r : report.rows) {
    const auto& p = r.params;
    const bool embedded = p.family == Family::erlc || p.family == Family::maxspan;
    out += csv::row({
      std::string(to_string(c.model)),
      csv::g6(c.alpha),
      csv::g6(c.beta),
      std::to_string(c.n_states),
      csv::g6(r.epsilon),
      r.code,
      embedded ? std::to_string(p.u) : std::string{},
      embedded ? std::to_string(p.v) : std::string{},
      embedded ? std::to_string(p.delta) : std::string{},
      std::to_string(p.T),
      std::to_string(r.rate.numerator()),
      std::to_string(r.rate.denominator()),
      std::to_string(c.channel_length * static_cast<std::size_t>(c.trials)),
      std::to_string(c.master_seed),
      csv::g6(r.uncoded_loss),
      csv::g6(r.coded_loss),
      csv::g6(r.stderr_loss),
      std::to_string(r.bursts_observed),
      std::to_string(r.max_burst),
    });
  }
  return out;
}

std::string histogram_csv(const channel::BurstHistogram& histogram, Model model, int n_states, double beta)
{
  std::string out = csv::row({"burst_length", "count", "expected_pmf"});
  for (const auto& [length, count] : histogram) {
    const double pmf = model == Model::ge ? channel::geometric_pmf(beta, length)
                                          : channel::negative_binomial_pmf(n_states - 1, beta, length);
    out += csv::row({std::to_string(length), std::to_string(count), csv::g6(pmf)});
  }
  return out;
}

std::vector<std::string> bundle_names()
{
  return {"ge_t12", "ge_t50", "fritch_t40", "fritch_t80", "tradeoff"};
}

namespace {

std::vector<CodeDescriptor> descriptors(const std::vector<std::string>& texts)
{
  std::vector<CodeDescriptor> out;
  for (const auto& t : texts) {
    out.push_back(parse_descriptor(t));
  }
  return out;
}

} // namespace

ExperimentConfig bundle_config(std::string_view name, const BundleOptions& options)
{
  ExperimentConfig c;
  std::size_t desk = 1000000;
  std::size_t full = 0;
  if (name == "ge_t12") {
    c.model = Model::ge;
    c.alpha = 5e-4;
    c.beta = 0.5;
    c.n_states = 2;
    full = 10000000;
    c.codes = descriptors({"uncoded", "rlc:k=12,n=23,T=12", "maxspan:B=11,T=12", "erlc:u=11,v=1,delta=10,T=12",
                           "erlc:u=11,v=1,delta=11,T=12"});
  } else if (name == "ge_t50") {
    c.model = Model::ge;
    c.alpha = 1e-5;
    c.beta = 0.1;
    c.n_states = 2;
    full = 100000000;
    c.codes = descriptors({"uncoded", "rlc:k=50,n=99,T=50", "maxspan:B=49,T=50", "erlc:u=49,v=1,delta=36,T=50",
                           "erlc:u=49,v=1,delta=44,T=50"});
  } else if (name == "fritch_t40") {
    c.model = Model::fritchman;
    c.alpha = 1e-5;
    c.beta = 0.5;
    c.n_states = 9;
    full = 100000000;
    c.codes = descriptors({"uncoded", "rlc:k=40,n=79,T=40", "maxspan:B=39,T=40", "erlc:u=39,v=1,delta=32,T=40",
                           "erlc:u=39,v=1,delta=36,T=40"});
  } else if (name == "fritch_t80") {
    c.model = Model::fritchman;
    c.alpha = 1e-5;
    c.beta = 0.5;
    c.n_states = 20;
    full = 100000000;
    c.codes = descriptors({"uncoded", "rlc:k=80,n=159,T=80", "maxspan:B=79,T=80", "erlc:u=79,v=1,delta=48,T=80",
                           "erlc:u=79,v=1,delta=52,T=80", "erlc:u=79,v=1,delta=60,T=80"});
  } else if (name == "tradeoff") {
    throw UsageError("the tradeoff bundle has no channel configuration");
  } else {
    throw UsageError("unknown bundle '" + std::string(name) + "' (expected ge_t12, ge_t50, fritch_t40, fritch_t80 or tradeoff)");
  }
  c.channel_length = options.length != 0 ? options.length : (options.full ? full : desk);
  c.eps_grid = options.eps_grid.empty() ? default_eps_grid() : options.eps_grid;
  c.trials = options.trials;
  c.master_seed = options.seed;
  c.jobs = options.jobs;
  return c;
}

std::string tradeoff_csv(const std::vector<Rational>& rates, int T)
{
  std::string out = csv::row({"R_num", "R_den", "u", "v", "T", "delta", "cT", "dT", "bound_dT", "bound_rhs",
                              "bound_lhs", "slack", "optimal_flag"});
  for (const auto& R : rates) {
    const auto [u, v] = metrics::erlc_split(R);
    for (const auto& row : metrics::tradeoff_table(R, T)) {
      out += csv::row({
        std::to_string(R.numerator()),
        std::to_string(R.denominator()),
        std::to_string(u),
        std::to_string(v),
        std::to_string(T),
        std::to_string(row.delta),
        std::to_string(row.cT),
        std::to_string(row.dT),
        csv::rational(row.bound_dT),
        csv::rational(metrics::bound_rhs(R, T)),
        csv::rational(metrics::bound_lhs(R, row.cT, row.dT)),
        csv::rational(row.slack),
        row.slack == Rational(0) ? "1" : "0",
      });
    }
  }
  return out;
}

std::vector<BundleFile> figure_bundle(std::string_view name, const BundleOptions& options)
{
  if (name == "tradeoff") {
    return {{"tradeoff.csv", tradeoff_csv({Rational(1, 2), Rational(3, 5), Rational(7, 10)}, 80)}};
  }
  const auto config = bundle_config(name, options);
  const auto report = run_experiment(config);
  return {
    {std::string(name) + "_loss.csv", loss_csv(report)},
    {std::string(name) + "_bursts.csv", histogram_csv(report.histogram, config.model, config.n_states, config.beta)},
  };
}

} // namespace streamcode::sim
