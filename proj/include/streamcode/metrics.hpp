#pragma once

#include "streamcode/code.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace streamcode::metrics {

/// Erasure indicator over packet positions [0, T]; true = erased.
struct ErasurePattern
{
  std::vector<bool> window;

  static ErasurePattern clear(int T);
  static ErasurePattern burst(int T, int start, int length);
  static ErasurePattern at_positions(int T, const std::vector<int>& positions);

  int deadline() const noexcept { return static_cast<int>(window.size()) - 1; }
  int erasures() const noexcept;
  bool operator[](int i) const { return window.at(static_cast<std::size_t>(i)); }
};

/// Whether s[0] is uniquely determined by the unerased packets in [0, deadline].
/// Solves the reduced system over the erased sub-symbols only.
bool recoverable(const CodeSpec& spec, const ErasurePattern& pattern);

/// 1 + the longest burst starting at 0 that still leaves s[0] recoverable.
int column_span_oracle(const CodeSpec& spec);

/// Default budget for column_distance_oracle, in patterns.
inline constexpr double k_default_pattern_limit = 2e6;

/// Patterns examined to settle every weight up to `weight`: sum of C(T, w-1).
double distance_pattern_count(int T, int weight);

/// Smallest weight w <= max_weight such that some pattern with position 0
/// erased and w-1 more erasures in [1, T] is not recoverable. nullopt when
/// every pattern up to the cap decodes. Throws EnumerationTooLarge before
/// starting a weight whose cumulative count would exceed `pattern_limit`.
std::optional<int> column_distance_oracle(const CodeSpec& spec, int max_weight,
                                          double pattern_limit = k_default_pattern_limit);
inline std::optional<int> column_distance_oracle(const CodeSpec& spec)
{
  return column_distance_oracle(spec, spec.delay() + 1);
}

/// First pattern found with `weight` erasures that defeats s[0], if any.
std::optional<ErasurePattern> distance_witness(const CodeSpec& spec, int weight);

int closed_form_cT(int u, int v, int delta, int T);
/// Throws RegimeError unless delta (2u+v) >= (u+v)(T+1).
int closed_form_dT(int u, int v, int delta, int T);
bool dT_closed_form_applies(int u, int v, int delta, int T) noexcept;

/// Integer Singleton-type column distance of a rate k/n code at delay T.
int singleton_column_distance(int k, int n, int T);

/// Right side of the rate tradeoff: T + 1 + 1/(1-R).
Rational bound_rhs(Rational R, int T);
/// Left side: (R/(1-R)) c_T + d_T.
Rational bound_lhs(Rational R, int cT, int dT);
/// bound_rhs - bound_lhs.
Rational bound_slack(Rational R, int T, int cT, int dT);
/// Largest d_T allowed for a given c_T: min(T + 1 + 1/(1-R) - (R/(1-R)) c_T, c_T).
Rational tradeoff_bound(Rational R, int T, int cT);

/// (u, v) with the fewest sub-symbols such that (u+v)/(2u+v) = R.
/// Throws ParameterError when R < 1/2 or R >= 1.
std::pair<int, int> erlc_split(Rational R);

struct TradeoffRow
{
  int delta = 0;
  int cT = 0;
  int dT = 0;
  Rational bound_dT;
  Rational slack;
};

/// Closed-form (c_T, d_T) for every delta in [ceil(R(T+1)), T] plus the bound.
std::vector<TradeoffRow> tradeoff_table(Rational R, int T);

struct MetricReport
{
  std::optional<int> cT_closed;
  std::optional<int> dT_closed;
  std::optional<int> cT_oracle;
  std::optional<int> dT_oracle;
  Rational rate;

  /// Oracle value when present, closed form otherwise.
  std::optional<int> cT() const { return cT_oracle ? cT_oracle : cT_closed; }
  std::optional<int> dT() const { return dT_oracle ? dT_oracle : dT_closed; }

  std::optional<Rational> rhs;
  std::optional<Rational> lhs;
  std::optional<Rational> slack;
  bool optimal() const { return slack && *slack == Rational(0); }
};

struct AnalyzeOptions
{
  bool span_oracle = false;
  bool distance_oracle = false;
  double pattern_limit = k_default_pattern_limit;
};

MetricReport analyze(const CodeSpec& spec, const AnalyzeOptions& options = {});

} // namespace streamcode::metrics
