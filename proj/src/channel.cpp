#include "streamcode/channel.hpp"

#include "streamcode/errors.hpp"
#include "streamcode/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace streamcode::channel {

namespace {

bool probability(double p)
{
  return p >= 0.0 && p <= 1.0;
}

} // namespace

void GilbertElliottParams::validate() const
{
  if (!probability(alpha) || !probability(beta) || !probability(epsilon)) {
    throw ParameterError("Gilbert-Elliott alpha, beta, epsilon must lie in [0, 1]");
  }
}

void FritchmanParams::validate() const
{
  if (n_error_states < 1) {
    throw ParameterError("Fritchman model needs at least one error state");
  }
  if (!probability(alpha) || !probability(beta) || !probability(epsilon)) {
    throw ParameterError("Fritchman alpha, beta, epsilon must lie in [0, 1]");
  }
}

std::size_t ErasureTrace::erasures() const noexcept
{
  return static_cast<std::size_t>(std::count(erased.begin(), erased.end(), std::uint8_t{1}));
}

double ErasureTrace::erasure_rate() const noexcept
{
  return erased.empty() ? 0.0 : static_cast<double>(erasures()) / static_cast<double>(erased.size());
}

ErasureTrace ge_trace(const GilbertElliottParams& params, std::size_t length, std::uint64_t seed)
{
  params.validate();
  FritchmanParams f;
  f.n_error_states = 1;
  f.alpha = params.alpha;
  f.beta = params.beta;
  f.epsilon = params.epsilon;
  ErasureTrace trace = fritchman_trace(f, length, seed);
  std::ostringstream tag;
  tag << "ge:alpha=" << params.alpha << ",beta=" << params.beta << ",epsilon=" << params.epsilon;
  trace.model_tag = tag.str();
  return trace;
}

ErasureTrace fritchman_trace(const FritchmanParams& params, std::size_t length, std::uint64_t seed)
{
  params.validate();
  rng::Stream state_draws(rng::derive(seed, "state"));
  rng::Stream loss_draws(rng::derive(seed, "loss"));
  ErasureTrace trace;
  trace.seed = seed;
  trace.erased.resize(length);
  int state = 0; // 0 = good, k = error state Ek
  for (std::size_t i = 0; i < length; ++i) {
    const double move = state_draws.uniform();
    if (state == 0) {
      if (move < params.alpha) {
        state = 1;
      }
    } else if (move < params.beta) {
      state = state == params.n_error_states ? 0 : state + 1;
    }
    const double loss = loss_draws.uniform();
    trace.erased[i] = (state != 0 || loss < params.epsilon) ? 1 : 0;
  }
  std::ostringstream tag;
  tag << "fritchman:n_states=" << params.n_error_states << ",alpha=" << params.alpha << ",beta=" << params.beta
      << ",epsilon=" << params.epsilon;
  trace.model_tag = tag.str();
  return trace;
}

double ge_loss_rate(const GilbertElliottParams& params)
{
  params.validate();
  const double total = params.alpha + params.beta;
  if (total == 0) {
    return params.epsilon;
  }
  return params.beta / total * params.epsilon + params.alpha / total;
}

int periodic_period(int cT, int dT, int T)
{
  if (T < 0 || dT < 1 || dT > cT || cT > T + 1) {
    throw ParameterError("periodic channel needs 1 <= dT <= cT <= T+1");
  }
  return T + cT - dT + 1;
}

ErasureTrace periodic_trace(int cT, int dT, int T, std::size_t n_periods)
{
  const int period = periodic_period(cT, dT, T);
  ErasureTrace trace;
  trace.erased.assign(static_cast<std::size_t>(period) * n_periods, 0);
  for (std::size_t p = 0; p < n_periods; ++p) {
    for (int i = 0; i < cT - 1; ++i) {
      trace.erased[p * static_cast<std::size_t>(period) + static_cast<std::size_t>(i)] = 1;
    }
  }
  trace.model_tag = "periodic:cT=" + std::to_string(cT) + ",dT=" + std::to_string(dT) + ",T=" + std::to_string(T);
  return trace;
}

void AdversaryParams::validate() const
{
  if (N < 0 || B < N || W < B || W < 1) {
    throw ParameterError("adversary needs 0 <= N <= B <= W and W >= 1");
  }
}

namespace {

// Window [first, last], clipped to the trace.
bool window_ok(const AdversaryParams& params, const std::vector<std::uint8_t>& erased, long first, long last)
{
  first = std::max(first, 0L);
  last = std::min(last, static_cast<long>(erased.size()) - 1);
  int count = 0;
  int runs = 0;
  bool previous = false;
  for (long i = first; i <= last; ++i) {
    const bool e = erased[static_cast<std::size_t>(i)] != 0;
    count += e ? 1 : 0;
    if (e && !previous) {
      ++runs;
    }
    previous = e;
  }
  return count <= params.N || (runs <= 1 && count <= params.B);
}

} // namespace

bool adversary_admissible(const AdversaryParams& params, const std::vector<std::uint8_t>& erased)
{
  params.validate();
  const long n = static_cast<long>(erased.size());
  for (long s = -params.W + 1; s < n; ++s) {
    if (!window_ok(params, erased, s, s + params.W - 1)) {
      return false;
    }
  }
  return true;
}

double adversary_count(const AdversaryParams& params, int horizon)
{
  params.validate();
  if (params.W > 20) {
    throw ParameterError("adversary counting supports W <= 20");
  }
  if (horizon <= 0) {
    return 1;
  }
  // State: the last W-1 slots as bits (bit 0 = most recent).
  const int history = params.W - 1;
  const std::size_t states = std::size_t{1} << history;
  const std::uint32_t keep = static_cast<std::uint32_t>(states - 1);
  std::vector<double> count(states, 0.0);
  std::vector<double> next(states, 0.0);
  count[0] = 1;
  std::vector<std::uint8_t> window(static_cast<std::size_t>(params.W));
  for (int t = 0; t < horizon; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < states; ++s) {
      if (count[s] == 0) {
        continue;
      }
      for (std::uint32_t bit = 0; bit < 2; ++bit) {
        const std::uint32_t full = (static_cast<std::uint32_t>(s) << 1) | bit;
        for (int i = 0; i < params.W; ++i) {
          window[static_cast<std::size_t>(params.W - 1 - i)] = static_cast<std::uint8_t>((full >> i) & 1U);
        }
        if (window_ok(params, window, 0, params.W - 1)) {
          next[full & keep] += count[s];
        }
      }
    }
    std::swap(count, next);
  }
  return std::accumulate(count.begin(), count.end(), 0.0);
}

std::size_t adversary_patterns(const AdversaryParams& params, int horizon,
                               const std::function<bool(const std::vector<std::uint8_t>&)>& visit, double limit)
{
  params.validate();
  const double total = adversary_count(params, horizon);
  if (total > limit) {
    throw EnumerationTooLarge("adversary enumeration has " + std::to_string(static_cast<long long>(total)) +
                                " admissible traces (limit " + std::to_string(static_cast<long long>(limit)) + ")",
                              total);
  }
  std::vector<std::uint8_t> trace(static_cast<std::size_t>(std::max(horizon, 0)), 0);
  std::size_t visited = 0;
  bool stop = false;
  std::function<void(int)> extend = [&](int i) {
    if (stop) {
      return;
    }
    if (i == horizon) {
      ++visited;
      stop = !visit(trace);
      return;
    }
    for (std::uint8_t bit = 0; bit < 2 && !stop; ++bit) {
      trace[static_cast<std::size_t>(i)] = bit;
      // Earlier windows were checked already; only the one ending here is new.
      if (window_ok(params, trace, i - params.W + 1, i)) {
        extend(i + 1);
      }
    }
    trace[static_cast<std::size_t>(i)] = 0;
  };
  extend(0);
  return visited;
}

BurstHistogram burst_histogram(const ErasureTrace& trace)
{
  BurstHistogram histogram;
  std::size_t run = 0;
  for (std::uint8_t e : trace.erased) {
    if (e) {
      ++run;
    } else if (run > 0) {
      ++histogram[run];
      run = 0;
    }
  }
  if (run > 0) {
    ++histogram[run];
  }
  return histogram;
}

BurstSummary summarize(const BurstHistogram& histogram)
{
  BurstSummary s;
  double total = 0;
  for (const auto& [length, count] : histogram) {
    s.bursts += count;
    total += static_cast<double>(length) * static_cast<double>(count);
  }
  if (!histogram.empty()) {
    s.min_length = histogram.begin()->first;
    s.max_length = histogram.rbegin()->first;
    s.mean_length = total / static_cast<double>(s.bursts);
  }
  return s;
}

double geometric_pmf(double beta, std::size_t length)
{
  if (length == 0) {
    return 0;
  }
  return std::pow(1 - beta, static_cast<double>(length - 1)) * beta;
}

double negative_binomial_pmf(int n, double beta, std::size_t length)
{
  if (n < 1 || length < static_cast<std::size_t>(n)) {
    return 0;
  }
  if (beta >= 1) {
    return length == static_cast<std::size_t>(n) ? 1.0 : 0.0;
  }
  const double f = static_cast<double>(length) - n;
  // C(n+f-1, f) beta^n (1-beta)^f
  const double log_binom = std::lgamma(n + f) - std::lgamma(f + 1) - std::lgamma(static_cast<double>(n));
  return std::exp(log_binom + n * std::log(beta) + f * std::log1p(-beta));
}

std::string to_run_length(const ErasureTrace& trace)
{
  std::ostringstream out;
  std::size_t i = 0;
  bool first = true;
  while (i < trace.erased.size()) {
    std::size_t j = i;
    while (j < trace.erased.size() && trace.erased[j] == trace.erased[i]) {
      ++j;
    }
    out << (first ? "" : " ") << (j - i) << (trace.erased[i] ? 'e' : 'c');
    first = false;
    i = j;
  }
  return out.str();
}

ErasureTrace from_run_length(std::string_view text)
{
  ErasureTrace trace;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    const char kind = token.back();
    if (token.size() < 2 || (kind != 'c' && kind != 'e')) {
      throw UsageError("bad run-length token '" + token + "'");
    }
    std::size_t used = 0;
    const unsigned long long n = std::stoull(token.substr(0, token.size() - 1), &used);
    if (used != token.size() - 1) {
      throw UsageError("bad run-length token '" + token + "'");
    }
    trace.erased.insert(trace.erased.end(), n, kind == 'e' ? 1 : 0);
  }
  return trace;
}

} // namespace streamcode::channel
