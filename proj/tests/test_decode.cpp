#include "streamcode/channel.hpp"
#include "streamcode/decode.hpp"
#include "streamcode/errors.hpp"
#include "streamcode/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace streamcode;
using decode::LossReport;
using decode::RunOptions;
using decode::StreamingDecoder;

namespace {

channel::ErasureTrace trace_of(std::vector<std::uint8_t> erased)
{
  channel::ErasureTrace t;
  t.erased = std::move(erased);
  return t;
}

channel::ErasureTrace random_trace(std::mt19937_64& gen, std::size_t length)
{
  const double density = static_cast<double>(gen() % 40) / 100.0;
  std::bernoulli_distribution erase(density);
  std::vector<std::uint8_t> e(length);
  for (auto& x : e) {
    x = erase(gen) ? 1 : 0;
  }
  // sometimes add a burst
  if (gen() % 2) {
    const auto start = gen() % length;
    const auto len = 1 + gen() % 8;
    for (std::size_t i = start; i < std::min(length, start + len); ++i) {
      e[i] = 1;
    }
  }
  return trace_of(std::move(e));
}

CodeSpec random_code(std::mt19937_64& gen)
{
  const auto seed = gen();
  const int T = 1 + static_cast<int>(gen() % 6);
  switch (gen() % 3) {
  case 0:
    return build_erlc(1 + static_cast<int>(gen() % 3), static_cast<int>(gen() % 3), static_cast<int>(gen() % (T + 1)),
                      T, gen() % 2 ? 16 : 8, seed);
  case 1:
    return build_maxspan(1 + static_cast<int>(gen() % T), T, 16, seed);
  default:
    return build_rlc(1 + static_cast<int>(gen() % 2), 3, T, 16, seed);
  }
}

/// Drives step() with real channel packets.
class Link
{
public:
  Link(const CodeSpec& spec, std::uint64_t source_seed) : spec_(spec), encoder_(spec), decoder_(spec), seed_(source_seed) {}

  const decode::StepResult& step(bool erased)
  {
    const std::int64_t t = next_++;
    std::vector<gf::Element> s(spec_.source_size());
    for (std::size_t a = 0; a < s.size(); ++a) {
      s[a] = decode::source_symbol(spec_, seed_, t, a);
    }
    const auto x = encoder_.push(make_source_packet(spec_, t, s));
    return decoder_.step(t, erased ? nullptr : &x);
  }

  StreamingDecoder& decoder() { return decoder_; }

private:
  const CodeSpec& spec_;
  Encoder encoder_;
  StreamingDecoder decoder_;
  std::uint64_t seed_;
  std::int64_t next_ = 0;
};

} // namespace

TEST(Decoder, NoErasuresNoLosses)
{
  const auto spec = build_erlc(3, 1, 4, 6, 16, 1);
  const auto r = decode::run(spec, trace_of(std::vector<std::uint8_t>(500, 0)), {.source_seed = 3});
  EXPECT_EQ(r.total_packets, 500u);
  EXPECT_EQ(r.lost_packets, 0u);
  EXPECT_EQ(r.loss_rate(), Rational(0));

  Link link(spec, 3);
  for (int t = 0; t < 50; ++t) {
    link.step(false);
    EXPECT_TRUE(link.decoder().idle());
    EXPECT_EQ(link.decoder().equations(), 0u);
  }
  EXPECT_EQ(link.decoder().inconsistencies(), 0u);
}

TEST(Decoder, MaxspanBurstTimeline)
{
  // v[0..B-1] known by T-1; u[j] known exactly at j+T; all done by T+B-1
  const int B = 3;
  const int T = 6;
  const auto spec = build_maxspan(B, T, 16, 12);
  Link link(spec, 5);
  auto& d = link.decoder();
  for (int t = 0; t <= T + B + 2; ++t) {
    link.step(t < B);
    for (int j = 0; j < B; ++j) {
      if (j < d.window_begin() || j > t) {
        continue;
      }
      for (int a = 0; a < B; ++a) {
        EXPECT_EQ(d.known(j, static_cast<std::size_t>(a)), t >= j + T) << "u[" << j << "] at t=" << t;
      }
    }
    if (t == T - 1) {
      for (int j = 0; j < B; ++j) {
        for (int a = B; a < T; ++a) {
          EXPECT_TRUE(d.known(j, static_cast<std::size_t>(a))) << "v[" << j << "] at t=" << t;
        }
      }
    }
    if (t == T + B - 1) {
      EXPECT_TRUE(d.idle());
    }
  }
  for (int j = 0; j < B; ++j) {
    for (std::size_t a = 0; a < spec.source_size(); ++a) {
      // values checked where still in the window
      if (j >= d.window_begin()) {
        EXPECT_EQ(d.value(j, a), decode::source_symbol(spec, 5, j, a));
      }
    }
  }
}

TEST(Decoder, ConversePatternsLose)
{
  const auto spec = build_erlc(11, 1, 10, 12, 16, 21);
  const auto witness = metrics::distance_witness(spec, 3);
  ASSERT_TRUE(witness);
  std::vector<std::uint8_t> e(40, 0);
  for (int i = 0; i <= 12; ++i) {
    e[static_cast<std::size_t>(i) + 5] = (*witness)[i] ? 1 : 0;
  }
  EXPECT_GE(decode::run(spec, trace_of(e), {.source_seed = 1}).lost_packets, 1u);

  std::vector<std::uint8_t> burst(40, 0);
  std::fill(burst.begin() + 5, burst.begin() + 15, 1); // c_T = 10
  EXPECT_GE(decode::run(spec, trace_of(burst), {.source_seed = 1}).lost_packets, 1u);
  std::fill(burst.begin() + 14, burst.end(), 0);
  EXPECT_EQ(decode::run(spec, trace_of(burst), {.source_seed = 1}).lost_packets, 0u);
}

TEST(Decoder, UncodedLosesExactlyTheErasures)
{
  std::mt19937_64 gen(5);
  const auto spec = build_uncoded();
  for (int i = 0; i < 20; ++i) {
    const auto t = random_trace(gen, 300);
    const auto r = decode::run(spec, t, {.source_seed = 2});
    EXPECT_EQ(r.lost_packets, t.erasures());
    EXPECT_EQ(r.loss_fraction(), t.erasure_rate());
  }
}

TEST(Decoder, PeriodicChannelIsLossless)
{
  for (const auto& spec : {build_erlc(11, 1, 10, 12, 16, 2), build_erlc(11, 1, 11, 12, 16, 2), build_erlc(2, 1, 5, 6, 16, 2),
                           build_maxspan(3, 5, 16, 2)}) {
    const int cT = metrics::column_span_oracle(spec);
    const int dT = *metrics::column_distance_oracle(spec);
    const auto trace = channel::periodic_trace(cT, dT, spec.delay(), 200);
    const auto r = decode::run(spec, trace, {.source_seed = 9, .full_parity = true});
    EXPECT_EQ(r.lost_packets, 0u) << spec.id();
    EXPECT_EQ(r.mismatched_symbols, 0u);
    EXPECT_GT(r.erased_packets, 0u);
  }
}

TEST(Decoder, AdversaryGuarantee)
{
  for (const auto& spec : {build_erlc(2, 1, 5, 6, 16, 3), build_maxspan(2, 4, 16, 3), build_erlc(1, 0, 4, 6, 16, 3)}) {
    const int cT = metrics::column_span_oracle(spec);
    const int dT = *metrics::column_distance_oracle(spec);
    const int W = spec.delay() + 1;
    const channel::AdversaryParams ok{cT - 1, dT - 1, W};
    std::size_t failures = 0;
    const auto count = channel::adversary_patterns(ok, 2 * W, [&](const std::vector<std::uint8_t>& e) {
      failures += decode::run(spec, trace_of(e), {.source_seed = 4}).lost_packets > 0 ? 1 : 0;
      return true;
    });
    EXPECT_GT(count, 0u);
    EXPECT_EQ(failures, 0u) << spec.id();

    const channel::AdversaryParams too_long{cT, dT - 1, W};
    bool found = false;
    channel::adversary_patterns(too_long, 2 * W, [&](const std::vector<std::uint8_t>& e) {
      found = decode::run(spec, trace_of(e), {.source_seed = 4}).lost_packets > 0;
      return !found;
    });
    EXPECT_TRUE(found) << spec.id();
  }
}

TEST(Decoder, OutOfOrderIsAContractViolation)
{
  const auto spec = build_erlc(2, 1, 2, 3, 16, 1);
  StreamingDecoder d(spec);
  d.step_erasure(0, false, [](std::int64_t, std::size_t) { return gf::Element{1}; });
  EXPECT_THROW(d.step_erasure(2, false, [](std::int64_t, std::size_t) { return gf::Element{1}; }), ContractViolation);
  EXPECT_THROW(d.step(0, nullptr), ContractViolation);
}

TEST(Decoder, ShardedRunsMatch)
{
  const auto spec = build_erlc(11, 1, 10, 12, 16, 8);
  const auto trace = channel::ge_trace({5e-3, 0.5, 5e-3}, 200000, 17);
  const auto whole = decode::run(spec, trace, {.source_seed = 6});
  const auto sharded = decode::run_sharded(spec, trace, 5, 2 * 13, 6);
  EXPECT_GT(whole.lost_packets, 0u);
  EXPECT_EQ(whole, sharded);
}

TEST(DecoderProperties, SoundAndBothPathsAgree)
{
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto spec = random_code(gen);
    const auto trace = random_trace(gen, 30 + gen() % 50);
    const auto seed = gen();
    const auto full = decode::run(spec, trace, {.source_seed = seed, .full_parity = true});
    const auto fast = decode::run(spec, trace, {.source_seed = seed});
    ASSERT_EQ(full.mismatched_symbols, 0u) << spec.id() << " " << channel::to_run_length(trace);
    ASSERT_EQ(full, fast) << spec.id() << " " << channel::to_run_length(trace);
    ASSERT_LE(full.lost_packets, full.erased_packets);
    ASSERT_EQ(full.total_packets, trace.length());
  }
}

TEST(DecoderProperties, RemovingErasuresNeverAddsLosses)
{
  std::mt19937_64 gen(100);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto spec = random_code(gen);
    auto trace = random_trace(gen, 60);
    const auto before = decode::run(spec, trace, {.source_seed = 1});
    std::vector<std::size_t> erased;
    for (std::size_t i = 0; i < trace.length(); ++i) {
      if (trace[i]) {
        erased.push_back(i);
      }
    }
    if (erased.empty()) {
      continue;
    }
    trace.erased[erased[gen() % erased.size()]] = 0;
    const auto after = decode::run(spec, trace, {.source_seed = 1});
    ASSERT_LE(after.lost_packets, before.lost_packets) << spec.id();
  }
}

TEST(DecoderProperties, Deterministic)
{
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = random_code(gen);
    const auto trace = random_trace(gen, 200);
    EXPECT_EQ(decode::run(spec, trace, {.source_seed = 5}), decode::run(spec, trace, {.source_seed = 5}));
  }
}
