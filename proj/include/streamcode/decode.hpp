#pragma once

#include "streamcode/channel.hpp"
#include "streamcode/code.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <unordered_map>
#include <vector>

namespace streamcode::decode {

struct Verdict
{
  std::int64_t time = 0;
  bool erased = false;    ///< the packet itself was lost on the channel
  bool recovered = false; ///< every sub-symbol known at the deadline
};

struct StepResult
{
  std::vector<Verdict> deadlines;
  /// Packets completed after their deadline but before retirement.
  std::vector<std::int64_t> late;
};

/// Erasure decoder with deadline T over a sliding window of unknowns.
///
/// Unknowns are the sub-symbols of erased packets. Each received parity
/// sub-symbol yields one linear equation in the unknowns it touches; the
/// equation set is kept in reduced row echelon form, so an unknown is known
/// exactly when its row has a single term. Unknowns older than the code
/// memory can no longer gain equations and are projected out of the system.
class StreamingDecoder
{
public:
  /// Times before `start` are treated as received.
  explicit StreamingDecoder(const CodeSpec& spec, std::int64_t start = 0);

  /// Feeds y[t]; `packet` is null when erased. The returned reference is
  /// valid until the next step. Constant terms are formed from
  /// the received parity minus the contribution of every known sub-symbol.
  const StepResult& step(std::int64_t t, const ChannelPacket* packet);

  /// Source sub-symbol (time, index) as the encoder saw it.
  using Truth = std::function<gf::Element(std::int64_t, std::size_t)>;

  /// Same decisions as step(), for simulation. The constant term of each
  /// reduced equation is what step() would obtain after cancelling known
  /// sub-symbols, evaluated directly from the erased sub-symbols' true values,
  /// so full parity never has to be formed.
  const StepResult& step_erasure(std::int64_t t, bool erased, const Truth& truth);

  std::int64_t next_time() const noexcept { return next_; }
  /// No unresolved sub-symbols in the window.
  bool idle() const noexcept { return unresolved_ == 0; }
  std::size_t unresolved() const noexcept { return unresolved_; }
  std::size_t equations() const noexcept { return rows_.size(); }
  /// Equations that reduced to 0 = nonzero; always 0 for consistent input.
  std::uint64_t inconsistencies() const noexcept { return inconsistent_; }

  /// Whether sub-symbol a of packet t is known; t must be inside the window.
  bool known(std::int64_t t, std::size_t a) const;
  /// Decoded (or received) value; only meaningful when known(t, a).
  gf::Element value(std::int64_t t, std::size_t a) const;

  /// Oldest time still held by the window.
  std::int64_t window_begin() const noexcept;

private:
  using Term = std::pair<std::int64_t, gf::Element>;
  struct Row
  {
    std::vector<Term> terms; // sorted by unknown id; pivot coefficient is 1
    std::int64_t pivot = 0;
    gf::Element rhs = 0;
  };
  struct Slot
  {
    std::int64_t time = std::numeric_limits<std::int64_t>::min();
    std::vector<gf::Element> value;
    std::vector<std::uint8_t> known;
    std::size_t unresolved = 0;
    bool erased = false;
  };

  Slot& slot(std::int64_t t);
  const Slot& slot(std::int64_t t) const;
  std::size_t column(std::int64_t id) const noexcept;
  std::int64_t id(std::int64_t t, std::size_t a) const noexcept { return t * static_cast<std::int64_t>(k_) + static_cast<std::int64_t>(a); }

  void open_slot(std::int64_t t, bool erased, const ChannelPacket* packet);
  void add_parity_equations(std::int64_t t, const ChannelPacket* packet, const Truth* truth);
  void insert(std::vector<Term> terms, gf::Element rhs);
  void resolve_singletons(const std::vector<std::int64_t>& pivots);
  void mark_known(std::int64_t id, gf::Element value);
  void remove_row(std::size_t index);
  void retire(std::int64_t t);
  const StepResult& finish_step(std::int64_t t);
  void axpy(std::vector<Term>& target, gf::Element& target_rhs, gf::Element factor, const Row& source);

  const CodeSpec* spec_;
  std::size_t k_;
  std::size_t p_;
  int memory_;
  int delay_;
  std::size_t ring_;
  std::int64_t start_;
  std::int64_t next_;
  std::vector<Slot> slots_;
  std::vector<std::vector<std::uint8_t>> active_; // [lag][a]: tap row can be nonzero
  std::vector<Row> rows_;
  std::unordered_map<std::int64_t, std::size_t> pivot_row_;
  std::size_t unresolved_ = 0;
  std::uint64_t inconsistent_ = 0;
  std::vector<gf::Element> scratch_;
  std::vector<std::uint8_t> touched_flag_;
  std::vector<std::int64_t> touched_;
  std::int64_t verdict_through_;
  std::vector<std::int64_t> candidates_;
  StepResult result_;
};

struct LossReport
{
  std::uint64_t total_packets = 0;
  std::uint64_t lost_packets = 0;
  std::uint64_t late_recoveries = 0;
  std::uint64_t erased_packets = 0;     ///< channel erasures among counted packets
  std::uint64_t mismatched_symbols = 0; ///< decoded values that differ from the source

  Rational loss_rate() const;
  double loss_fraction() const;

  LossReport& operator+=(const LossReport& other);
  friend bool operator==(const LossReport&, const LossReport&) = default;
};

struct RunOptions
{
  std::uint64_t source_seed = 0;
  /// Counted region [begin, end) of the trace; end = 0 means the whole trace.
  std::size_t begin = 0;
  std::size_t end = 0;
  /// Steps decoded before `begin` but not counted. Positions before
  /// begin - warmup are treated as received.
  std::size_t warmup = 0;
  /// Encode every parity packet and decode with step() instead of step_erasure().
  bool full_parity = false;
};

/// Source sub-symbol a of s[t] for a seeded stream.
gf::Element source_symbol(const CodeSpec& spec, std::uint64_t source_seed, std::int64_t t, std::size_t a);

/// Encodes a seeded source stream, erases it per the trace, and decodes it.
/// Packets at and past the trace end are delivered so every counted packet
/// reaches its deadline.
LossReport run(const CodeSpec& spec, const channel::ErasureTrace& trace, const RunOptions& options = {});

/// Splits [0, length) into `shards` pieces with the given warmup and sums the
/// per-shard reports.
LossReport run_sharded(const CodeSpec& spec, const channel::ErasureTrace& trace, std::size_t shards,
                       std::size_t warmup, std::uint64_t source_seed);

} // namespace streamcode::decode
