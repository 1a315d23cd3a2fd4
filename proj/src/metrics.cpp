#include "streamcode/metrics.hpp"

#include "streamcode/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace streamcode::metrics {

ErasurePattern ErasurePattern::clear(int T)
{
  if (T < 0) {
    throw ParameterError("pattern deadline must be >= 0");
  }
  return ErasurePattern{std::vector<bool>(static_cast<std::size_t>(T) + 1, false)};
}

ErasurePattern ErasurePattern::burst(int T, int start, int length)
{
  auto p = clear(T);
  for (int i = std::max(start, 0); i < start + length && i <= T; ++i) {
    p.window[static_cast<std::size_t>(i)] = true;
  }
  return p;
}

ErasurePattern ErasurePattern::at_positions(int T, const std::vector<int>& positions)
{
  auto p = clear(T);
  for (int i : positions) {
    if (i < 0 || i > T) {
      throw ParameterError("erasure position outside [0, T]");
    }
    p.window[static_cast<std::size_t>(i)] = true;
  }
  return p;
}

int ErasurePattern::erasures() const noexcept
{
  return static_cast<int>(std::count(window.begin(), window.end(), true));
}

bool recoverable(const CodeSpec& spec, const ErasurePattern& pattern)
{
  if (pattern.window.empty() || !pattern.window[0]) {
    return true;
  }
  const std::size_t k = spec.source_size();
  const std::size_t p = spec.parity_size();
  const std::size_t u = static_cast<std::size_t>(spec.u());
  const int last = pattern.deadline();
  const int memory = spec.memory();
  if (p == 0) {
    return false;
  }

  // Unknown columns: u-part of later erased packets by time, then their
  // v-part, then s[0] last so its pivots count rank(all) - rank(others).
  std::vector<std::pair<int, std::size_t>> unknowns;
  for (int t = 1; t <= last; ++t) {
    if (pattern[t]) {
      for (std::size_t a = 0; a < u; ++a) {
        unknowns.emplace_back(t, a);
      }
    }
  }
  for (int t = 1; t <= last; ++t) {
    if (pattern[t]) {
      for (std::size_t a = u; a < k; ++a) {
        unknowns.emplace_back(t, a);
      }
    }
  }

  std::vector<int> received;
  for (int i = 0; i <= last; ++i) {
    if (!pattern[i]) {
      received.push_back(i);
    }
  }
  auto coefficient = [&](int i, std::size_t r, int t, std::size_t a) -> gf::Element {
    const int lag = i - t;
    if (lag < 0 || lag > memory) {
      return 0;
    }
    return spec.tap(lag)(a, r);
  };

  // Columns of later unknowns that no received parity touches cannot affect s[0].
  std::vector<std::pair<int, std::size_t>> columns;
  for (const auto& [t, a] : unknowns) {
    bool used = false;
    for (int i : received) {
      const int lag = i - t;
      if (lag < 0 || lag > memory) {
        continue;
      }
      const auto rows = spec.tap_rows(lag);
      if (std::find(rows.begin(), rows.end(), a) != rows.end()) {
        used = true;
        break;
      }
    }
    if (used) {
      columns.emplace_back(t, a);
    }
  }
  const std::size_t first_s0 = columns.size();
  for (std::size_t a = 0; a < k; ++a) {
    columns.emplace_back(0, a);
  }

  gf::FieldMatrix system(received.size() * p, columns.size());
  for (std::size_t e = 0; e < received.size(); ++e) {
    for (std::size_t r = 0; r < p; ++r) {
      auto row = system.row(e * p + r);
      for (std::size_t c = 0; c < columns.size(); ++c) {
        row[c] = coefficient(received[e], r, columns[c].first, columns[c].second);
      }
    }
  }
  const auto pivots = gf::pivot_columns(spec.field(), std::move(system));
  const auto s0_pivots = std::count_if(pivots.begin(), pivots.end(), [&](std::size_t c) { return c >= first_s0; });
  return static_cast<std::size_t>(s0_pivots) == k;
}

int column_span_oracle(const CodeSpec& spec)
{
  const int T = spec.delay();
  // Longest recoverable burst lies in [lo, hi); recoverability is monotone in length.
  int lo = 0;
  int hi = T + 1;
  if (recoverable(spec, ErasurePattern::burst(T, 0, hi))) {
    return T + 2;
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (recoverable(spec, ErasurePattern::burst(T, 0, mid))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 1;
}

double distance_pattern_count(int T, int weight)
{
  double total = 0;
  double binom = 1; // C(T, w-1)
  for (int w = 1; w <= weight && w - 1 <= T; ++w) {
    total += binom;
    binom = binom * (T - (w - 1)) / w;
  }
  return total;
}

namespace {

// Calls visit on every pattern with position 0 erased and `extra` of [1, T];
// stops as soon as visit returns true.
template <class Visit>
bool for_each_pattern(int T, int extra, Visit&& visit)
{
  if (extra > T) {
    return false;
  }
  std::vector<int> pick(static_cast<std::size_t>(extra));
  for (int i = 0; i < extra; ++i) {
    pick[static_cast<std::size_t>(i)] = i + 1;
  }
  auto pattern = ErasurePattern::clear(T);
  while (true) {
    std::fill(pattern.window.begin(), pattern.window.end(), false);
    pattern.window[0] = true;
    for (int i : pick) {
      pattern.window[static_cast<std::size_t>(i)] = true;
    }
    if (visit(pattern)) {
      return true;
    }
    int i = extra - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == T - (extra - 1 - i)) {
      --i;
    }
    if (i < 0) {
      return false;
    }
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < extra; ++j) {
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

} // namespace

std::optional<ErasurePattern> distance_witness(const CodeSpec& spec, int weight)
{
  std::optional<ErasurePattern> found;
  for_each_pattern(spec.delay(), weight - 1, [&](const ErasurePattern& p) {
    if (!recoverable(spec, p)) {
      found = p;
      return true;
    }
    return false;
  });
  return found;
}

std::optional<int> column_distance_oracle(const CodeSpec& spec, int max_weight, double pattern_limit)
{
  const int T = spec.delay();
  for (int w = 1; w <= std::min(max_weight, T + 1); ++w) {
    const double needed = distance_pattern_count(T, w);
    if (needed > pattern_limit) {
      throw EnumerationTooLarge("column distance enumeration up to weight " + std::to_string(w) + " needs about " +
                                  std::to_string(static_cast<long long>(needed)) + " patterns (limit " +
                                  std::to_string(static_cast<long long>(pattern_limit)) + ")",
                                needed);
    }
    if (distance_witness(spec, w)) {
      return w;
    }
  }
  return std::nullopt;
}

namespace {

void check_erlc(int u, int v, int delta, int T)
{
  if (u < 1 || v < 0 || T < 0 || delta < 0 || delta > T) {
    throw ParameterError("closed forms need u >= 1, v >= 0, 0 <= delta <= T");
  }
}

} // namespace

int closed_form_cT(int u, int v, int delta, int T)
{
  check_erlc(u, v, delta, T);
  // Whole burst solved jointly from the parities after it, or u-parts peeled
  // one by one as their shifted parities arrive.
  const int joint = u * (T + 1) / (2 * u + v);
  const int sequential = u * delta / (u + v);
  return std::max(joint, sequential) + 1;
}

bool dT_closed_form_applies(int u, int v, int delta, int T) noexcept
{
  if (u < 1 || v < 0 || T < 0 || delta < 0 || delta > T) {
    return false;
  }
  return static_cast<long long>(delta) * (2 * u + v) >= static_cast<long long>(u + v) * (T + 1);
}

int closed_form_dT(int u, int v, int delta, int T)
{
  check_erlc(u, v, delta, T);
  if (!dT_closed_form_applies(u, v, delta, T)) {
    throw RegimeError("d_T closed form needs delta >= R(T+1); got u=" + std::to_string(u) + ", v=" +
                      std::to_string(v) + ", delta=" + std::to_string(delta) + ", T=" + std::to_string(T));
  }
  return u * (T - delta) / (u + v) + 2;
}

int singleton_column_distance(int k, int n, int T)
{
  if (k < 1 || k > n || T < 0) {
    throw ParameterError("singleton bound needs 1 <= k <= n, T >= 0");
  }
  return 1 + (n - k) * (T + 1) / n;
}

namespace {

void check_rate(Rational R)
{
  if (R <= Rational(0) || R >= Rational(1)) {
    throw ParameterError("rate must lie in (0, 1)");
  }
}

} // namespace

Rational bound_rhs(Rational R, int T)
{
  check_rate(R);
  return Rational(T + 1) + Rational(1) / (Rational(1) - R);
}

Rational bound_lhs(Rational R, int cT, int dT)
{
  check_rate(R);
  return R / (Rational(1) - R) * cT + dT;
}

Rational bound_slack(Rational R, int T, int cT, int dT)
{
  return bound_rhs(R, T) - bound_lhs(R, cT, dT);
}

Rational tradeoff_bound(Rational R, int T, int cT)
{
  const Rational b = bound_rhs(R, T) - R / (Rational(1) - R) * cT;
  return std::min(b, Rational(cT));
}

std::pair<int, int> erlc_split(Rational R)
{
  check_rate(R);
  if (R < Rational(1, 2)) {
    throw ParameterError("embedded codes have rate >= 1/2");
  }
  // (u+v)/(2u+v) = a/b  =>  u = b - a, v = 2a - b.
  const auto a = R.numerator();
  const auto b = R.denominator();
  return {static_cast<int>(b - a), static_cast<int>(2 * a - b)};
}

std::vector<TradeoffRow> tradeoff_table(Rational R, int T)
{
  const auto [u, v] = erlc_split(R);
  const Rational start = R * (T + 1);
  const int first = static_cast<int>(start.numerator() / start.denominator() + (start.denominator() == 1 ? 0 : 1));
  std::vector<TradeoffRow> rows;
  for (int delta = std::max(first, 0); delta <= T; ++delta) {
    TradeoffRow row;
    row.delta = delta;
    row.cT = closed_form_cT(u, v, delta, T);
    row.dT = closed_form_dT(u, v, delta, T);
    row.bound_dT = tradeoff_bound(R, T, row.cT);
    row.slack = bound_slack(R, T, row.cT, row.dT);
    rows.push_back(row);
  }
  return rows;
}

MetricReport analyze(const CodeSpec& spec, const AnalyzeOptions& options)
{
  MetricReport report;
  report.rate = spec.rate();
  const int T = spec.delay();
  if (spec.family() == Family::erlc || spec.family() == Family::maxspan) {
    report.cT_closed = closed_form_cT(spec.u(), spec.v(), spec.delta(), T);
    if (dT_closed_form_applies(spec.u(), spec.v(), spec.delta(), T)) {
      report.dT_closed = closed_form_dT(spec.u(), spec.v(), spec.delta(), T);
    }
  } else if (spec.family() == Family::rlc) {
    report.dT_closed = singleton_column_distance(static_cast<int>(spec.source_size()),
                                                 static_cast<int>(spec.channel_size()), T);
  } else {
    report.cT_closed = 1;
    report.dT_closed = 1;
  }
  if (options.span_oracle) {
    report.cT_oracle = column_span_oracle(spec);
  }
  if (options.distance_oracle) {
    // refuse up front when the expected answer is already out of reach
    const int expected = report.dT_closed ? std::min(*report.dT_closed, T + 1) : T + 1;
    const double needed = distance_pattern_count(T, expected);
    if (needed > options.pattern_limit) {
      throw EnumerationTooLarge("column distance enumeration up to weight " + std::to_string(expected) +
                                  " needs about " + std::to_string(static_cast<long long>(needed)) +
                                  " patterns (limit " + std::to_string(static_cast<long long>(options.pattern_limit)) +
                                  ")",
                                needed);
    }
    report.dT_oracle = column_distance_oracle(spec, T + 1, options.pattern_limit);
  }
  if (report.rate < Rational(1)) {
    report.rhs = bound_rhs(report.rate, T);
    const auto c = report.cT();
    const auto d = report.dT();
    if (c && d) {
      report.lhs = bound_lhs(report.rate, *c, *d);
      report.slack = *report.rhs - *report.lhs;
    }
  }
  return report;
}

} // namespace streamcode::metrics
