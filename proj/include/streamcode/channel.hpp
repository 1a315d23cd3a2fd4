#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace streamcode::channel {

struct GilbertElliottParams
{
  double alpha = 0; ///< good -> bad per step
  double beta = 1;  ///< bad -> good per step
  double epsilon = 0;

  void validate() const;
};

/// Good state G followed by error states E1..EN visited in order.
struct FritchmanParams
{
  int n_error_states = 1;
  double alpha = 0; ///< G -> E1
  double beta = 1;  ///< Ek -> Ek+1, and EN -> G
  double epsilon = 0;

  void validate() const;
};

struct ErasureTrace
{
  std::vector<std::uint8_t> erased; ///< 1 = erased
  std::uint64_t seed = 0;
  std::string model_tag;

  std::size_t length() const noexcept { return erased.size(); }
  bool operator[](std::size_t i) const noexcept { return erased[i] != 0; }
  std::size_t erasures() const noexcept;
  double erasure_rate() const noexcept;

  friend bool operator==(const ErasureTrace&, const ErasureTrace&) = default;
};

/// Starts in the good state. Each step first moves the chain, then draws the
/// loss; state and loss draws come from separate substreams of `seed`, so the
/// state path does not depend on epsilon and erasure sets are nested in it.
ErasureTrace ge_trace(const GilbertElliottParams& params, std::size_t length, std::uint64_t seed);
ErasureTrace fritchman_trace(const FritchmanParams& params, std::size_t length, std::uint64_t seed);

/// Stationary erasure probability of the Gilbert-Elliott chain.
double ge_loss_rate(const GilbertElliottParams& params);

/// Period T + cT - dT + 1 whose first cT - 1 slots are erased.
ErasureTrace periodic_trace(int cT, int dT, int T, std::size_t n_periods);
int periodic_period(int cT, int dT, int T);

/// Sliding-window adversary: every length-W window holds at most N erasures
/// or a single burst of length at most B.
struct AdversaryParams
{
  int B = 0;
  int N = 0;
  int W = 1;

  void validate() const;
};

/// Checks every window [s, s+W-1] that meets the trace; slots outside it are clear.
bool adversary_admissible(const AdversaryParams& params, const std::vector<std::uint8_t>& erased);
inline bool adversary_admissible(const AdversaryParams& params, const ErasureTrace& trace)
{
  return adversary_admissible(params, trace.erased);
}

/// Exact number of admissible traces of the given length.
double adversary_count(const AdversaryParams& params, int horizon);

inline constexpr double k_default_trace_limit = 5e6;

/// Visits every admissible trace over [0, horizon) in lexicographic order
/// (clear before erased). `visit` returns false to stop early. Returns the
/// number of traces visited. Throws EnumerationTooLarge when the count
/// exceeds `limit`.
std::size_t adversary_patterns(const AdversaryParams& params, int horizon,
                               const std::function<bool(const std::vector<std::uint8_t>&)>& visit,
                               double limit = k_default_trace_limit);

/// Maximal runs of erasures, by length.
using BurstHistogram = std::map<std::size_t, std::uint64_t>;
BurstHistogram burst_histogram(const ErasureTrace& trace);

struct BurstSummary
{
  std::uint64_t bursts = 0;
  std::size_t min_length = 0;
  std::size_t max_length = 0;
  double mean_length = 0;
};
BurstSummary summarize(const BurstHistogram& histogram);

/// P(L = l) for geometric bursts with exit probability beta.
double geometric_pmf(double beta, std::size_t length);
/// P(L = l) for a Fritchman burst: sum of n geometric(beta) dwell times.
double negative_binomial_pmf(int n, double beta, std::size_t length);

/// Run-length text such as "12c 3e 40c".
std::string to_run_length(const ErasureTrace& trace);
ErasureTrace from_run_length(std::string_view text);

} // namespace streamcode::channel
