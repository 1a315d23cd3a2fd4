#include "streamcode/decode.hpp"

#include "streamcode/errors.hpp"
#include "streamcode/rng.hpp"

#include <algorithm>
#include <string>

namespace streamcode::decode {

StreamingDecoder::StreamingDecoder(const CodeSpec& spec, std::int64_t start)
  : spec_(&spec),
    k_(spec.source_size()),
    p_(spec.parity_size()),
    memory_(spec.memory()),
    delay_(spec.delay()),
    ring_(static_cast<std::size_t>(std::max(spec.memory(), spec.delay())) + 1),
    start_(start),
    next_(start),
    verdict_through_(start - 1)
{
  if (start < 0) {
    throw ContractViolation("decoder start time must be >= 0");
  }
  slots_.resize(ring_);
  for (auto& s : slots_) {
    s.value.assign(k_, 0);
    s.known.assign(k_, 1);
  }
  active_.resize(static_cast<std::size_t>(memory_) + 1);
  for (int lag = 0; lag <= memory_; ++lag) {
    auto& row = active_[static_cast<std::size_t>(lag)];
    row.assign(k_, 0);
    for (std::size_t a : spec.tap_rows(lag)) {
      row[a] = 1;
    }
  }
  scratch_.assign(ring_ * k_, 0);
  touched_flag_.assign(ring_ * k_, 0);
}

StreamingDecoder::Slot& StreamingDecoder::slot(std::int64_t t)
{
  auto& s = slots_[static_cast<std::size_t>(t) % ring_];
  if (s.time != t) {
    throw ContractViolation("time " + std::to_string(t) + " is outside the decoder window");
  }
  return s;
}

const StreamingDecoder::Slot& StreamingDecoder::slot(std::int64_t t) const
{
  return const_cast<StreamingDecoder*>(this)->slot(t);
}

std::size_t StreamingDecoder::column(std::int64_t id) const noexcept
{
  const auto k = static_cast<std::int64_t>(k_);
  return (static_cast<std::size_t>(id / k) % ring_) * k_ + static_cast<std::size_t>(id % k);
}

std::int64_t StreamingDecoder::window_begin() const noexcept
{
  return std::max(start_, next_ - static_cast<std::int64_t>(ring_));
}

bool StreamingDecoder::known(std::int64_t t, std::size_t a) const
{
  if (t < start_) {
    return true;
  }
  return slot(t).known.at(a) != 0;
}

gf::Element StreamingDecoder::value(std::int64_t t, std::size_t a) const
{
  if (t < start_) {
    return 0;
  }
  return slot(t).value.at(a);
}

void StreamingDecoder::open_slot(std::int64_t t, bool erased, const ChannelPacket* packet)
{
  auto& s = slots_[static_cast<std::size_t>(t) % ring_];
  if (s.unresolved != 0) {
    throw ContractViolation("slot reused before its unknowns were retired");
  }
  s.time = t;
  s.erased = erased;
  if (erased) {
    std::fill(s.known.begin(), s.known.end(), std::uint8_t{0});
    std::fill(s.value.begin(), s.value.end(), gf::Element{0});
    s.unresolved = k_;
    unresolved_ += k_;
    return;
  }
  std::fill(s.known.begin(), s.known.end(), std::uint8_t{1});
  if (packet != nullptr) {
    const auto u = packet->u_part.size();
    if (u + packet->v_part.size() != k_ || packet->parity.size() != p_) {
      throw ContractViolation("channel packet shape does not match the code");
    }
    std::copy(packet->u_part.begin(), packet->u_part.end(), s.value.begin());
    std::copy(packet->v_part.begin(), packet->v_part.end(), s.value.begin() + static_cast<std::ptrdiff_t>(u));
  }
}

void StreamingDecoder::add_parity_equations(std::int64_t t, const ChannelPacket* packet, const Truth* truth)
{
  if (unresolved_ == 0 || p_ == 0) {
    return;
  }
  struct Unknown
  {
    int lag;
    std::size_t a;
    std::int64_t id;
    gf::Element truth;
  };
  std::vector<Unknown> pending;
  for (int lag = memory_; lag >= 0; --lag) {
    const std::int64_t tau = t - lag;
    if (tau < start_) {
      continue;
    }
    const auto& s = slot(tau);
    if (s.unresolved == 0) {
      continue;
    }
    const auto& active = active_[static_cast<std::size_t>(lag)];
    for (std::size_t a = 0; a < k_; ++a) {
      if (!s.known[a] && active[a]) {
        pending.push_back({lag, a, id(tau, a), truth != nullptr ? (*truth)(tau, a) : gf::Element{0}});
      }
    }
  }
  if (pending.empty()) {
    return;
  }

  const auto& field = spec_->field();
  std::vector<gf::Element> constant(p_, 0);
  if (packet != nullptr) {
    std::copy(packet->parity.begin(), packet->parity.end(), constant.begin());
    for (int lag = 0; lag <= memory_; ++lag) {
      const std::int64_t tau = t - lag;
      if (tau < 0) {
        break;
      }
      const auto& s = slot(tau);
      const auto& tap = spec_->tap(lag);
      for (std::size_t a : spec_->tap_rows(lag)) {
        if (!s.known[a] || s.value[a] == 0) {
          continue;
        }
        for (std::size_t r = 0; r < p_; ++r) {
          constant[r] ^= field.mul(s.value[a], tap(a, r));
        }
      }
    }
  }

  for (std::size_t r = 0; r < p_; ++r) {
    std::vector<Term> terms;
    gf::Element rhs = constant[r];
    for (const auto& x : pending) {
      const gf::Element c = spec_->tap(x.lag)(x.a, r);
      if (c == 0) {
        continue;
      }
      terms.emplace_back(x.id, c);
      if (packet == nullptr) {
        rhs ^= field.mul(c, x.truth);
      }
    }
    if (terms.empty()) {
      if (rhs != 0) {
        ++inconsistent_;
      }
      continue;
    }
    insert(std::move(terms), rhs);
  }
}

void StreamingDecoder::axpy(std::vector<Term>& target, gf::Element& target_rhs, gf::Element factor, const Row& source)
{
  const auto& field = spec_->field();
  std::vector<Term> out;
  out.reserve(target.size() + source.terms.size());
  auto i = target.begin();
  auto j = source.terms.begin();
  while (i != target.end() || j != source.terms.end()) {
    if (j == source.terms.end() || (i != target.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == target.end() || j->first < i->first) {
      out.emplace_back(j->first, field.mul(factor, j->second));
      ++j;
    } else {
      const gf::Element v = i->second ^ field.mul(factor, j->second);
      if (v != 0) {
        out.emplace_back(i->first, v);
      }
      ++i;
      ++j;
    }
  }
  target.swap(out);
  target_rhs ^= field.mul(factor, source.rhs);
}

void StreamingDecoder::insert(std::vector<Term> terms, gf::Element rhs)
{
  const auto& field = spec_->field();

  // Reduce against existing pivots in a dense scratch row over the window.
  touched_.clear();
  auto add = [&](std::int64_t id, gf::Element c) {
    const std::size_t col = column(id);
    scratch_[col] ^= c;
    if (!touched_flag_[col]) {
      touched_flag_[col] = 1;
      touched_.push_back(id);
    }
  };
  const auto k = static_cast<std::int64_t>(k_);
  for (auto& [id, c] : terms) {
    // Unknowns resolved earlier in this step move to the constant side.
    const auto& s = slot(id / k);
    const auto a = static_cast<std::size_t>(id % k);
    if (s.known[a]) {
      rhs ^= field.mul(c, s.value[a]);
      c = 0;
      continue;
    }
    add(id, c);
  }
  for (const auto& [id, c] : terms) {
    if (c == 0) {
      continue;
    }
    auto it = pivot_row_.find(id);
    if (it == pivot_row_.end()) {
      continue;
    }
    const Row& row = rows_[it->second];
    for (const auto& [id2, c2] : row.terms) {
      add(id2, field.mul(c, c2));
    }
    rhs ^= field.mul(c, row.rhs);
  }
  terms.clear();
  for (std::int64_t id : touched_) {
    const std::size_t col = column(id);
    if (scratch_[col] != 0) {
      terms.emplace_back(id, scratch_[col]);
    }
    scratch_[col] = 0;
    touched_flag_[col] = 0;
  }
  if (terms.empty()) {
    if (rhs != 0) {
      ++inconsistent_;
    }
    return;
  }
  std::sort(terms.begin(), terms.end());

  Row fresh;
  fresh.pivot = terms.front().first;
  const gf::Element scale = field.inv(terms.front().second);
  for (auto& term : terms) {
    term.second = field.mul(term.second, scale);
  }
  fresh.rhs = field.mul(rhs, scale);
  fresh.terms = std::move(terms);

  candidates_.clear();
  for (auto& row : rows_) {
    auto it = std::lower_bound(row.terms.begin(), row.terms.end(), Term{fresh.pivot, 0},
                               [](const Term& x, const Term& y) { return x.first < y.first; });
    if (it == row.terms.end() || it->first != fresh.pivot) {
      continue;
    }
    axpy(row.terms, row.rhs, it->second, fresh);
    candidates_.push_back(row.pivot);
  }
  pivot_row_[fresh.pivot] = rows_.size();
  candidates_.push_back(fresh.pivot);
  rows_.push_back(std::move(fresh));
  auto pivots = candidates_;
  resolve_singletons(pivots);
}

void StreamingDecoder::mark_known(std::int64_t id, gf::Element value)
{
  const auto k = static_cast<std::int64_t>(k_);
  const std::int64_t t = id / k;
  const auto a = static_cast<std::size_t>(id % k);
  auto& s = slot(t);
  if (s.known[a]) {
    return;
  }
  s.known[a] = 1;
  s.value[a] = value;
  --s.unresolved;
  --unresolved_;
  if (s.unresolved == 0 && t <= verdict_through_) {
    result_.late.push_back(t);
  }
}

void StreamingDecoder::resolve_singletons(const std::vector<std::int64_t>& pivots)
{
  for (std::int64_t pivot : pivots) {
    auto it = pivot_row_.find(pivot);
    if (it == pivot_row_.end()) {
      continue;
    }
    const Row& row = rows_[it->second];
    if (row.terms.size() != 1) {
      continue;
    }
    // A pivot appears in no other row, so nothing else needs substituting.
    mark_known(pivot, row.rhs);
    remove_row(it->second);
  }
}

void StreamingDecoder::remove_row(std::size_t index)
{
  pivot_row_.erase(rows_[index].pivot);
  if (index + 1 != rows_.size()) {
    rows_[index] = std::move(rows_.back());
    pivot_row_[rows_[index].pivot] = index;
  }
  rows_.pop_back();
}

void StreamingDecoder::retire(std::int64_t t)
{
  auto& s = slot(t);
  if (s.unresolved == 0) {
    return;
  }
  const auto& field = spec_->field();
  std::vector<std::int64_t> touched;
  for (std::size_t a = 0; a < k_; ++a) {
    if (s.known[a]) {
      continue;
    }
    const std::int64_t x = id(t, a);
    if (auto it = pivot_row_.find(x); it != pivot_row_.end()) {
      remove_row(it->second);
      continue;
    }
    // Project x out: solve one row for x, substitute it everywhere else, drop that row.
    std::vector<std::pair<std::size_t, gf::Element>> holders;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto& terms = rows_[i].terms;
      auto it = std::lower_bound(terms.begin(), terms.end(), Term{x, 0},
                                 [](const Term& l, const Term& r) { return l.first < r.first; });
      if (it != terms.end() && it->first == x) {
        holders.emplace_back(i, it->second);
      }
    }
    if (holders.empty()) {
      continue;
    }
    const auto pick = std::min_element(holders.begin(), holders.end(), [&](const auto& l, const auto& r) {
      return rows_[l.first].terms.size() < rows_[r.first].terms.size();
    });
    const std::size_t source_index = pick->first;
    const gf::Element source_coef = pick->second;
    for (const auto& [i, c] : holders) {
      if (i == source_index) {
        continue;
      }
      axpy(rows_[i].terms, rows_[i].rhs, field.div(c, source_coef), rows_[source_index]);
      touched.push_back(rows_[i].pivot);
    }
    remove_row(source_index);
  }
  unresolved_ -= s.unresolved;
  s.unresolved = 0;
  resolve_singletons(touched);
}

const StepResult& StreamingDecoder::finish_step(std::int64_t t)
{
  const std::int64_t due = t - delay_;
  if (due >= start_) {
    const auto& s = slot(due);
    result_.deadlines.push_back({due, s.erased, s.unresolved == 0});
    verdict_through_ = due;
  }
  const std::int64_t old = t - memory_;
  if (old >= start_) {
    retire(old);
  }
  return result_;
}

const StepResult& StreamingDecoder::step(std::int64_t t, const ChannelPacket* packet)
{
  if (t != next_) {
    throw ContractViolation("decoder expected time " + std::to_string(next_) + ", got " + std::to_string(t));
  }
  if (start_ != 0) {
    throw ContractViolation("decoding from parity needs the stream from time 0");
  }
  if (packet != nullptr && packet->time != t) {
    throw ContractViolation("packet time does not match the step");
  }
  result_.deadlines.clear();
  result_.late.clear();
  open_slot(t, packet == nullptr, packet);
  if (packet != nullptr) {
    add_parity_equations(t, packet, nullptr);
  }
  ++next_;
  return finish_step(t);
}

const StepResult& StreamingDecoder::step_erasure(std::int64_t t, bool erased, const Truth& truth)
{
  if (t != next_) {
    throw ContractViolation("decoder expected time " + std::to_string(next_) + ", got " + std::to_string(t));
  }
  result_.deadlines.clear();
  result_.late.clear();
  open_slot(t, erased, nullptr);
  if (!erased) {
    add_parity_equations(t, nullptr, &truth);
  }
  ++next_;
  return finish_step(t);
}

Rational LossReport::loss_rate() const
{
  if (total_packets == 0) {
    return 0;
  }
  return {static_cast<std::int64_t>(lost_packets), static_cast<std::int64_t>(total_packets)};
}

double LossReport::loss_fraction() const
{
  return total_packets == 0 ? 0.0 : static_cast<double>(lost_packets) / static_cast<double>(total_packets);
}

LossReport& LossReport::operator+=(const LossReport& other)
{
  total_packets += other.total_packets;
  lost_packets += other.lost_packets;
  late_recoveries += other.late_recoveries;
  erased_packets += other.erased_packets;
  mismatched_symbols += other.mismatched_symbols;
  return *this;
}

gf::Element source_symbol(const CodeSpec& spec, std::uint64_t source_seed, std::int64_t t, std::size_t a)
{
  if (t < 0) {
    return 0;
  }
  const auto counter = static_cast<std::uint64_t>(t) * spec.source_size() + a;
  return static_cast<gf::Element>(rng::at(source_seed, counter) & spec.field().mask());
}

LossReport run(const CodeSpec& spec, const channel::ErasureTrace& trace, const RunOptions& options)
{
  const std::size_t length = trace.length();
  const std::size_t end = options.end == 0 ? length : std::min(options.end, length);
  const std::size_t begin = std::min(options.begin, end);
  const std::size_t start = begin >= options.warmup ? begin - options.warmup : 0;
  if (options.full_parity && start != 0) {
    throw ContractViolation("full-parity runs cannot be sharded");
  }
  const std::size_t k = spec.source_size();
  StreamingDecoder decoder(spec, static_cast<std::int64_t>(start));
  const StreamingDecoder::Truth truth = [&](std::int64_t t, std::size_t a) {
    return source_symbol(spec, options.source_seed, t, a);
  };

  LossReport report;
  auto count = [&](const StepResult& result) {
    for (const auto& v : result.deadlines) {
      if (v.time < static_cast<std::int64_t>(begin) || v.time >= static_cast<std::int64_t>(end)) {
        continue;
      }
      ++report.total_packets;
      report.erased_packets += v.erased ? 1 : 0;
      if (!v.recovered) {
        ++report.lost_packets;
      } else if (v.erased) {
        for (std::size_t a = 0; a < k; ++a) {
          if (decoder.value(v.time, a) != truth(v.time, a)) {
            ++report.mismatched_symbols;
          }
        }
      }
    }
    for (std::int64_t t : result.late) {
      if (t >= static_cast<std::int64_t>(begin) && t < static_cast<std::int64_t>(end)) {
        ++report.late_recoveries;
      }
    }
  };

  const std::int64_t last = static_cast<std::int64_t>(end) - 1 + spec.delay();
  ChannelPacket packet;
  std::vector<gf::Element> symbols(k);
  for (std::int64_t t = static_cast<std::int64_t>(start); t <= last; ++t) {
    const bool erased = t < static_cast<std::int64_t>(length) && trace[static_cast<std::size_t>(t)];
    if (!options.full_parity) {
      count(decoder.step_erasure(t, erased, truth));
      continue;
    }
    if (erased) {
      count(decoder.step(t, nullptr));
      continue;
    }
    for (std::size_t a = 0; a < k; ++a) {
      symbols[a] = truth(t, a);
    }
    const auto s = make_source_packet(spec, t, symbols);
    packet.time = t;
    packet.u_part = s.u_part;
    packet.v_part = s.v_part;
    packet.parity.assign(spec.parity_size(), 0);
    compute_parity(spec, t, truth, packet.parity);
    count(decoder.step(t, &packet));
  }
  return report;
}

LossReport run_sharded(const CodeSpec& spec, const channel::ErasureTrace& trace, std::size_t shards,
                       std::size_t warmup, std::uint64_t source_seed)
{
  if (shards == 0) {
    throw ParameterError("need at least one shard");
  }
  LossReport total;
  const std::size_t length = trace.length();
  for (std::size_t i = 0; i < shards; ++i) {
    RunOptions options;
    options.source_seed = source_seed;
    options.begin = length * i / shards;
    options.end = length * (i + 1) / shards;
    options.warmup = warmup;
    if (options.end > options.begin) {
      total += run(spec, trace, options);
    }
  }
  return total;
}

} // namespace streamcode::decode
