#include "streamcode/cli.hpp"

#include "streamcode/channel.hpp"
#include "streamcode/code.hpp"
#include "streamcode/csv.hpp"
#include "streamcode/decode.hpp"
#include "streamcode/errors.hpp"
#include "streamcode/metrics.hpp"
#include "streamcode/sim.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace streamcode::cli {

namespace {

constexpr const char* k_invocation_prefix = "# invocation: ";

/// Shortest decimal text that parses back to the same double.
std::string exact(double x)
{
  char buffer[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, x);
    if (std::strtod(buffer, nullptr) == x) {
      break;
    }
  }
  return buffer;
}

std::size_t parse_length(const std::string& text)
{
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size() || value < 0 || value != std::floor(value) || value > 1e12) {
    throw UsageError("length must be a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(value);
}

Rational parse_rate(const std::string& text)
{
  if (auto slash = text.find('/'); slash != std::string::npos) {
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  }
  // Exact decimal: "0.6" -> 6/10.
  const auto dot = text.find('.');
  std::string digits = text;
  std::int64_t den = 1;
  if (dot != std::string::npos) {
    digits = text.substr(0, dot) + text.substr(dot + 1);
    for (std::size_t i = dot + 1; i < text.size(); ++i) {
      den *= 10;
    }
  }
  std::size_t used = 0;
  const long long num = std::stoll(digits, &used);
  if (used != digits.size()) {
    throw UsageError("bad rate '" + text + "'");
  }
  return Rational(num, den);
}

std::string rate_text(const Rational& r)
{
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

unsigned default_field_m()
{
  if (const char* env = std::getenv("STREAMCODE_FIELD_M"); env != nullptr && *env != '\0') {
    try {
      const int m = std::stoi(env);
      if (m >= 2 && m <= 16) {
        return static_cast<unsigned>(m);
      }
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("STREAMCODE_FIELD_M must be an integer in [2, 16], got '") + env + "'");
  }
  return 16;
}

std::string join(const std::vector<std::string>& parts)
{
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) {
      out += ' ';
    }
    out += p;
  }
  return out;
}

struct Output
{
  std::vector<std::string> header; // without "# "
  std::string body;

  std::string text() const { return csv::comment_block(header) + body; }
};

Output start_output(const std::vector<std::string>& invocation)
{
  Output o;
  o.header.push_back("streamcode output; regenerate with the invocation below");
  o.header.push_back(std::string("invocation: ") + join(invocation));
  return o;
}

void emit(const Output& o, const std::string& path, std::ostream& out)
{
  if (path.empty() || path == "-") {
    out << o.text();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw UsageError("cannot write '" + path + "'");
  }
  file << o.text();
  out << "wrote " << path << '\n';
}

CodeDescriptor code_from(const std::string& text)
{
  return parse_descriptor(text);
}

CodeSpec resolved_code(const CodeDescriptor& d, std::uint64_t seed, unsigned field_m)
{
  CodeParams p = d.params;
  p.seed = sim::code_seed(seed, d);
  p.field_m = field_m;
  return build(p);
}

std::string fail_line(const std::string& command, const std::string& detail)
{
  return "FAIL " + command + " " + detail + "\n";
}

// ---- subcommand settings -------------------------------------------------

struct Common
{
  std::uint64_t seed = sim::k_default_seed;
  std::optional<unsigned> field_m;
  std::string out;

  unsigned field() const { return field_m ? *field_m : default_field_m(); }
};

struct MetricsArgs : Common
{
  std::string code;
  std::optional<int> u, v, delta, T;
  bool oracle = false;
  bool ct_oracle = false;
  double pattern_limit = metrics::k_default_pattern_limit;
};

struct TradeoffArgs : Common
{
  std::vector<std::string> rates{"1/2", "3/5", "7/10"};
  int T = 80;
};

struct ChannelArgs : Common
{
  std::string model = "ge";
  double alpha = 5e-4;
  double beta = 0.5;
  std::optional<int> n_states;
  std::string len = "1000000";
  unsigned jobs = 1;

  int states() const
  {
    if (n_states) {
      return *n_states;
    }
    if (sim::parse_model(model) == sim::Model::ge) {
      return 2;
    }
    throw UsageError("--n-states is required for the fritchman model");
  }
};

struct SimulateArgs : ChannelArgs
{
  std::vector<double> eps_grid;
  std::vector<std::string> codes;
  int trials = 1;
  std::string histogram_out;
};

struct HistogramArgs : ChannelArgs
{
  double eps = 0;
};

struct AdversaryArgs : Common
{
  std::string code;
  int B = 0;
  int N = 0;
  std::optional<int> W;
  std::optional<int> horizon;
  double trace_limit = channel::k_default_trace_limit;
};

struct PeriodicArgs : Common
{
  std::string code;
  std::optional<int> cT;
  std::optional<int> dT;
  int periods = 200;
};

struct BundleArgs : Common
{
  std::string name;
  std::string out_dir = ".";
  bool full = false;
  std::string len;
  int trials = 1;
  unsigned jobs = 1;
  std::vector<double> eps_grid;
};

void add_common(CLI::App* app, Common& c, bool with_out = true)
{
  app->add_option("--seed", c.seed, "master seed (default " + std::to_string(sim::k_default_seed) + ")");
  app->add_option("--field-m", c.field_m, "field degree m of GF(2^m); default from STREAMCODE_FIELD_M or 16")
    ->check(CLI::Range(2, 16));
  if (with_out) {
    app->add_option("--out", c.out, "output file (default stdout)");
  }
}

void add_channel(CLI::App* app, ChannelArgs& c)
{
  app->add_option("--model", c.model, "ge or fritchman")->check(CLI::IsMember({"ge", "fritchman"}));
  app->add_option("--alpha", c.alpha, "good -> bad (or G -> E1) transition probability");
  app->add_option("--beta", c.beta, "exit probability of each bad / error state");
  app->add_option("--n-states", c.n_states, "total states: 2 for ge, N+1 for fritchman");
  app->add_option("--len", c.len, "channel length (accepts 1e6)");
}

std::vector<std::string> channel_invocation(const ChannelArgs& c)
{
  return {"--model", c.model,          "--alpha", exact(c.alpha), "--beta", exact(c.beta),
          "--n-states", std::to_string(c.states()), "--len", std::to_string(parse_length(c.len))};
}

std::string eps_list(const std::vector<double>& grid)
{
  std::string out;
  for (double e : grid) {
    if (!out.empty()) {
      out += ',';
    }
    out += exact(e);
  }
  return out;
}

// ---- subcommands ---------------------------------------------------------

int cmd_metrics(const MetricsArgs& a, std::ostream& out, std::ostream& err)
{
  CodeDescriptor d;
  if (!a.code.empty()) {
    if (a.u || a.v || a.delta || a.T) {
      throw UsageError("give either --code or --u/--v/--delta/--T, not both");
    }
    d = code_from(a.code);
  } else {
    if (!a.u || !a.v || !a.delta || !a.T) {
      throw UsageError("metrics needs --code or all of --u, --v, --delta, --T");
    }
    d.params.family = Family::erlc;
    d.params.u = *a.u;
    d.params.v = *a.v;
    d.params.delta = *a.delta;
    d.params.T = *a.T;
  }
  const unsigned m = a.field();
  std::vector<std::string> inv{"metrics", "--code", descriptor(d.params, d.has_seed), "--field-m", std::to_string(m),
                               "--seed", std::to_string(a.seed)};
  if (a.oracle) {
    inv.insert(inv.end(), {"--oracle", "--pattern-limit", exact(a.pattern_limit)});
  } else if (a.ct_oracle) {
    inv.push_back("--ct-oracle");
  }
  const CodeSpec spec = resolved_code(d, a.seed, m);

  metrics::AnalyzeOptions options;
  options.span_oracle = a.oracle || a.ct_oracle;
  options.distance_oracle = a.oracle;
  options.pattern_limit = a.pattern_limit;
  metrics::MetricReport r;
  try {
    r = metrics::analyze(spec, options);
  } catch (const EnumerationTooLarge& e) {
    err << fail_line("metrics", "reason=enumeration-too-large estimated_patterns=" +
                                  std::to_string(static_cast<long long>(e.estimated_count())) +
                                  " limit=" + std::to_string(static_cast<long long>(a.pattern_limit)));
    err << "column distance oracle is infeasible here; use --ct-oracle for the span only\n";
    return k_exit_usage;
  }

  Output o = start_output(inv);
  o.header.push_back("code_seed=" + std::to_string(spec.seed()));
  o.header.push_back("weights are counted per packet; d_T oracle fixes position 0 erased");
  const auto& p = spec.params();
  const bool embedded = p.family == Family::erlc || p.family == Family::maxspan;
  o.body = csv::row({"code_id", "u", "v", "delta", "T", "field_m", "seed", "R_num", "R_den", "cT_closed", "dT_closed",
                     "cT_oracle", "dT_oracle", "bound_rhs", "bound_lhs", "optimal_flag"});
  o.body += csv::row({
    label(p),
    std::to_string(spec.u()),
    std::to_string(spec.v()),
    embedded ? std::to_string(p.delta) : std::string{},
    std::to_string(p.T),
    std::to_string(m),
    std::to_string(spec.seed()),
    std::to_string(r.rate.numerator()),
    std::to_string(r.rate.denominator()),
    csv::optional_int(r.cT_closed),
    csv::optional_int(r.dT_closed),
    csv::optional_int(r.cT_oracle),
    a.oracle ? (r.dT_oracle ? std::to_string(*r.dT_oracle) : std::string(">T+1")) : std::string{},
    r.rhs ? csv::rational(*r.rhs) : std::string{},
    r.lhs ? csv::rational(*r.lhs) : std::string{},
    r.slack ? (r.optimal() ? "1" : "0") : std::string{},
  });
  emit(o, a.out, out);
  return k_exit_ok;
}

int cmd_tradeoff(const TradeoffArgs& a, std::ostream& out)
{
  std::vector<Rational> rates;
  std::vector<std::string> inv{"tradeoff"};
  for (const auto& text : a.rates) {
    rates.push_back(parse_rate(text));
    inv.insert(inv.end(), {"--R", rate_text(rates.back())});
  }
  inv.insert(inv.end(), {"--T", std::to_string(a.T)});
  Output o = start_output(inv);
  o.header.push_back("closed-form (c_T, d_T) per shift against the rate bound");
  o.body = sim::tradeoff_csv(rates, a.T);
  emit(o, a.out, out);
  return k_exit_ok;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out)
{
  if (a.codes.empty()) {
    throw UsageError(std::string("--codes is required; ") + k_descriptor_grammar);
  }
  sim::ExperimentConfig c;
  for (const auto& text : a.codes) {
    c.codes.push_back(code_from(text));
  }
  c.model = sim::parse_model(a.model);
  c.alpha = a.alpha;
  c.beta = a.beta;
  c.n_states = a.states();
  c.eps_grid = a.eps_grid.empty() ? sim::default_eps_grid() : a.eps_grid;
  c.channel_length = parse_length(a.len);
  c.trials = a.trials;
  c.master_seed = a.seed;
  c.field_m = a.field();
  c.jobs = a.jobs;
  c.validate();

  std::vector<std::string> inv{"simulate"};
  const auto ch = channel_invocation(a);
  inv.insert(inv.end(), ch.begin(), ch.end());
  inv.insert(inv.end(), {"--eps-grid", eps_list(c.eps_grid), "--trials", std::to_string(c.trials)});
  for (const auto& d : c.codes) {
    inv.insert(inv.end(), {"--codes", descriptor(d.params, d.has_seed)});
  }
  inv.insert(inv.end(), {"--seed", std::to_string(c.master_seed), "--field-m", std::to_string(c.field_m)});

  const auto report = sim::run_experiment(c);
  Output o = start_output(inv);
  for (const auto& d : c.codes) {
    o.header.push_back("code " + label(d.params) + " seed=" + std::to_string(sim::code_seed(c.master_seed, d)));
  }
  for (int t = 0; t < c.trials; ++t) {
    o.header.push_back("trial " + std::to_string(t) + " trace_seed=" + std::to_string(sim::trace_seed(c.master_seed, t)) +
                       " source_seed=" + std::to_string(sim::source_seed(c.master_seed, t)));
  }
  o.header.push_back("loss_unit=packet (a packet is lost if any sub-symbol is unresolved at its deadline)");
  o.body = sim::loss_csv(report);
  emit(o, a.out, out);
  if (!a.histogram_out.empty()) {
    Output h = start_output(inv);
    h.header.push_back("bursts of the epsilon = 0 trace, trial 0");
    h.body = sim::histogram_csv(report.histogram, c.model, c.n_states, c.beta);
    emit(h, a.histogram_out, out);
  }
  return k_exit_ok;
}

int cmd_histogram(const HistogramArgs& a, std::ostream& out)
{
  sim::ExperimentConfig c;
  c.model = sim::parse_model(a.model);
  c.alpha = a.alpha;
  c.beta = a.beta;
  c.n_states = a.states();
  c.channel_length = parse_length(a.len);
  c.master_seed = a.seed;
  if (!(a.eps >= 0 && a.eps <= 1)) {
    throw UsageError("--eps must lie in [0, 1]");
  }
  std::vector<std::string> inv{"histogram"};
  const auto ch = channel_invocation(a);
  inv.insert(inv.end(), ch.begin(), ch.end());
  inv.insert(inv.end(), {"--eps", exact(a.eps), "--seed", std::to_string(a.seed)});

  const auto trace = sim::make_trace(c, a.eps, 0);
  const auto histogram = channel::burst_histogram(trace);
  const auto s = channel::summarize(histogram);
  Output o = start_output(inv);
  o.header.push_back("trace_seed=" + std::to_string(trace.seed));
  o.header.push_back("bursts=" + std::to_string(s.bursts) + " mean_length=" + csv::g6(s.mean_length) +
                     " min_length=" + std::to_string(s.min_length) + " max_length=" + std::to_string(s.max_length));
  o.body = sim::histogram_csv(histogram, c.model, c.n_states, c.beta);
  emit(o, a.out, out);
  return k_exit_ok;
}

int cmd_adversary(const AdversaryArgs& a, std::ostream& out)
{
  const CodeDescriptor d = code_from(a.code);
  const unsigned m = a.field();
  const CodeSpec spec = resolved_code(d, a.seed, m);
  channel::AdversaryParams adv;
  adv.B = a.B;
  adv.N = a.N;
  adv.W = a.W ? *a.W : spec.delay() + 1;
  const int horizon = a.horizon ? *a.horizon : 2 * adv.W;
  adv.validate();

  const std::string what = "code=" + label(spec.params()) + " B=" + std::to_string(adv.B) + " N=" +
                           std::to_string(adv.N) + " W=" + std::to_string(adv.W) + " horizon=" + std::to_string(horizon);
  decode::RunOptions options;
  options.source_seed = sim::source_seed(a.seed, 0);
  std::optional<std::vector<std::uint8_t>> witness;
  decode::LossReport witness_report;
  channel::ErasureTrace trace;
  const std::size_t checked = channel::adversary_patterns(
    adv, horizon,
    [&](const std::vector<std::uint8_t>& erased) {
      trace.erased = erased;
      const auto r = decode::run(spec, trace, options);
      if (r.lost_packets > 0 || r.mismatched_symbols > 0) {
        witness = erased;
        witness_report = r;
        return false;
      }
      return true;
    },
    a.trace_limit);
  if (witness) {
    std::string bits;
    for (auto e : *witness) {
      bits += e ? '1' : '0';
    }
    out << "FAIL adversary-check " << what << " traces_checked=" << checked << " witness=" << bits
        << " lost=" << witness_report.lost_packets << '\n';
    return k_exit_check_failed;
  }
  out << "PASS adversary-check " << what << " traces=" << checked << '\n';
  return k_exit_ok;
}

int cmd_periodic(const PeriodicArgs& a, std::ostream& out)
{
  const CodeDescriptor d = code_from(a.code);
  const unsigned m = a.field();
  const CodeSpec spec = resolved_code(d, a.seed, m);
  if (a.periods < 100) {
    throw UsageError("--periods must be at least 100");
  }
  std::string source = "given";
  int cT = 0;
  int dT = 0;
  if (a.cT) {
    cT = *a.cT;
  } else {
    cT = metrics::column_span_oracle(spec);
    source = "oracle";
  }
  if (a.dT) {
    dT = *a.dT;
  } else {
    try {
      dT = *metrics::column_distance_oracle(spec);
      source = source == "given" ? "mixed" : source;
    } catch (const EnumerationTooLarge&) {
      const auto r = metrics::analyze(spec);
      if (!r.dT_closed) {
        throw UsageError("d_T oracle is infeasible and no closed form applies; pass --dT");
      }
      dT = *r.dT_closed;
      source = "closed-form";
    }
  }
  const auto trace = channel::periodic_trace(cT, dT, spec.delay(), static_cast<std::size_t>(a.periods));
  decode::RunOptions options;
  options.source_seed = sim::source_seed(a.seed, 0);
  const auto r = decode::run(spec, trace, options);
  const std::string what = "code=" + label(spec.params()) + " cT=" + std::to_string(cT) + " dT=" + std::to_string(dT) +
                           " metrics=" + source + " period=" + std::to_string(channel::periodic_period(cT, dT, spec.delay())) +
                           " periods=" + std::to_string(a.periods) + " lost=" + std::to_string(r.lost_packets) +
                           " loss_rate=" + csv::g6(r.loss_fraction());
  if (r.lost_packets > 0 || r.mismatched_symbols > 0) {
    out << "FAIL periodic-check " << what << '\n';
    return k_exit_check_failed;
  }
  out << "PASS periodic-check " << what << '\n';
  return k_exit_ok;
}

int cmd_bundle(const BundleArgs& a, std::ostream& out)
{
  sim::BundleOptions options;
  options.seed = a.seed;
  options.full = a.full;
  options.length = a.len.empty() ? 0 : parse_length(a.len);
  options.trials = a.trials;
  options.jobs = a.jobs;
  options.eps_grid = a.eps_grid;
  std::vector<std::string> inv{"bundle", "--name", a.name, "--seed", std::to_string(a.seed)};
  if (a.full) {
    inv.push_back("--full");
  }
  if (options.length != 0) {
    inv.insert(inv.end(), {"--len", std::to_string(options.length)});
  }
  if (a.name != "tradeoff") {
    inv.insert(inv.end(), {"--trials", std::to_string(a.trials)});
  }
  if (!a.eps_grid.empty()) {
    inv.insert(inv.end(), {"--eps-grid", eps_list(a.eps_grid)});
  }
  const auto files = sim::figure_bundle(a.name, options);
  std::filesystem::create_directories(a.out_dir);
  for (const auto& f : files) {
    Output o = start_output(inv);
    o.body = f.body;
    emit(o, (std::filesystem::path(a.out_dir) / f.name).string(), out);
  }
  return k_exit_ok;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Low-delay streaming erasure codes: metrics, bounds and channel simulation", "streamcode"};
  app.require_subcommand(1);
  app.footer(std::string(k_descriptor_grammar) + "\nExit status: 0 pass, 1 check failed, 2 usage error.");

  MetricsArgs metrics_args;
  auto* metrics_cmd = app.add_subcommand("metrics", "column span / distance of a code and the rate bound");
  add_common(metrics_cmd, metrics_args);
  metrics_cmd->add_option("--code", metrics_args.code, "code descriptor");
  metrics_cmd->add_option("--u", metrics_args.u, "urgent sub-symbols");
  metrics_cmd->add_option("--v", metrics_args.v, "non-urgent sub-symbols");
  metrics_cmd->add_option("--delta", metrics_args.delta, "parity shift");
  metrics_cmd->add_option("--T", metrics_args.T, "decoding delay");
  metrics_cmd->add_flag("--oracle", metrics_args.oracle, "also run both exhaustive oracles");
  metrics_cmd->add_flag("--ct-oracle", metrics_args.ct_oracle, "run the column span oracle only");
  metrics_cmd->add_option("--pattern-limit", metrics_args.pattern_limit, "largest d_T enumeration allowed");

  TradeoffArgs tradeoff_args;
  auto* tradeoff_cmd = app.add_subcommand("tradeoff", "achievable (c_T, d_T) against the rate bound");
  add_common(tradeoff_cmd, tradeoff_args);
  tradeoff_cmd->add_option("--R", tradeoff_args.rates, "rates, as a/b or decimals");
  tradeoff_cmd->add_option("--T", tradeoff_args.T, "decoding delay");

  SimulateArgs simulate_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "loss rate of codes over a burst channel");
  add_common(simulate_cmd, simulate_args);
  add_channel(simulate_cmd, simulate_args);
  simulate_cmd->add_option("--eps-grid", simulate_args.eps_grid, "good-state loss probabilities")->delimiter(',');
  simulate_cmd->add_option("--codes", simulate_args.codes, "code descriptors");
  simulate_cmd->add_option("--trials", simulate_args.trials, "independent traces per grid point");
  simulate_cmd->add_option("--jobs", simulate_args.jobs, "worker threads");
  simulate_cmd->add_option("--histogram-out", simulate_args.histogram_out, "burst histogram side file");

  HistogramArgs histogram_args;
  auto* histogram_cmd = app.add_subcommand("histogram", "burst-length histogram of a channel trace");
  add_common(histogram_cmd, histogram_args);
  add_channel(histogram_cmd, histogram_args);
  histogram_cmd->add_option("--eps", histogram_args.eps, "good-state loss probability");

  AdversaryArgs adversary_args;
  auto* adversary_cmd = app.add_subcommand("adversary-check", "decode every admissible sliding-window trace");
  add_common(adversary_cmd, adversary_args, false);
  adversary_cmd->add_option("--code", adversary_args.code, "code descriptor")->required();
  adversary_cmd->add_option("--B", adversary_args.B, "longest burst per window")->required();
  adversary_cmd->add_option("--N", adversary_args.N, "isolated erasures per window")->required();
  adversary_cmd->add_option("--W", adversary_args.W, "window length (default T+1)");
  adversary_cmd->add_option("--horizon", adversary_args.horizon, "trace length (default 2W)");
  adversary_cmd->add_option("--trace-limit", adversary_args.trace_limit, "largest enumeration allowed");

  PeriodicArgs periodic_args;
  auto* periodic_cmd = app.add_subcommand("periodic-check", "decode the periodic channel built from (c_T, d_T)");
  add_common(periodic_cmd, periodic_args, false);
  periodic_cmd->add_option("--code", periodic_args.code, "code descriptor")->required();
  periodic_cmd->add_option("--cT", periodic_args.cT, "column span (default: oracle)");
  periodic_cmd->add_option("--dT", periodic_args.dT, "column distance (default: oracle, else closed form)");
  periodic_cmd->add_option("--periods", periodic_args.periods, "number of periods (>= 100)");

  BundleArgs bundle_args;
  auto* bundle_cmd = app.add_subcommand("bundle", "write the CSV files behind one figure");
  add_common(bundle_cmd, bundle_args, false);
  bundle_cmd->add_option("--name", bundle_args.name, "ge_t12, ge_t50, fritch_t40, fritch_t80 or tradeoff")->required();
  bundle_cmd->add_option("--out-dir", bundle_args.out_dir, "directory for the CSV files");
  bundle_cmd->add_flag("--full", bundle_args.full, "full-length run (1e7 or 1e8 steps)");
  bundle_cmd->add_option("--len", bundle_args.len, "channel length override");
  bundle_cmd->add_option("--trials", bundle_args.trials, "independent traces per grid point");
  bundle_cmd->add_option("--jobs", bundle_args.jobs, "worker threads");
  bundle_cmd->add_option("--eps-grid", bundle_args.eps_grid, "good-state loss probabilities")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? k_exit_ok : k_exit_usage;
  }

  std::string command = "streamcode";
  try {
    if (metrics_cmd->parsed()) {
      command = "metrics";
      return cmd_metrics(metrics_args, out, err);
    }
    if (tradeoff_cmd->parsed()) {
      command = "tradeoff";
      return cmd_tradeoff(tradeoff_args, out);
    }
    if (simulate_cmd->parsed()) {
      command = "simulate";
      return cmd_simulate(simulate_args, out);
    }
    if (histogram_cmd->parsed()) {
      command = "histogram";
      return cmd_histogram(histogram_args, out);
    }
    if (adversary_cmd->parsed()) {
      command = "adversary-check";
      return cmd_adversary(adversary_args, out);
    }
    if (periodic_cmd->parsed()) {
      command = "periodic-check";
      return cmd_periodic(periodic_args, out);
    }
    if (bundle_cmd->parsed()) {
      command = "bundle";
      return cmd_bundle(bundle_args, out);
    }
  } catch (const EnumerationTooLarge& e) {
    err << fail_line(command, "reason=enumeration-too-large estimated=" +
                                std::to_string(static_cast<long long>(e.estimated_count())));
    err << e.what() << '\n';
    return k_exit_usage;
  } catch (const std::invalid_argument& e) {
    err << fail_line(command, "reason=usage");
    err << e.what() << '\n';
    return k_exit_usage;
  } catch (const std::exception& e) {
    err << fail_line(command, "reason=error");
    err << e.what() << '\n';
    return k_exit_usage;
  }
  return k_exit_usage;
}

std::string invocation_from_header(const std::string& output)
{
  std::istringstream in(output);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(k_invocation_prefix, 0) == 0) {
      return line.substr(std::string(k_invocation_prefix).size());
    }
    if (line.empty() || line.front() != '#') {
      break;
    }
  }
  return {};
}

std::vector<std::string> split_invocation(const std::string& line)
{
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string token;
  while (in >> token) {
    out.push_back(token);
  }
  return out;
}

} // namespace streamcode::cli
