#include "streamcode/code.hpp"

#include "streamcode/errors.hpp"
#include "streamcode/metrics.hpp"
#include "streamcode/rng.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <string>

namespace streamcode {

const char* const k_descriptor_grammar =
  "code descriptors: erlc:u=<int>,v=<int>,delta=<int>,T=<int>[,seed=<int>] | "
  "maxspan:B=<int>,T=<int>[,seed=<int>] | rlc:k=<int>,n=<int>,T=<int>[,seed=<int>] | uncoded";

namespace {

constexpr int k_max_rlc_resamples = 8;
constexpr int k_rlc_verify_max_delay = 12;

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <class Int>
Int parse_int(std::string_view text, std::string_view key)
{
  Int value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw UsageError("bad integer for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return value;
}

Family parse_family(std::string_view name)
{
  if (name == "erlc") {
    return Family::erlc;
  }
  if (name == "maxspan") {
    return Family::maxspan;
  }
  if (name == "rlc") {
    return Family::rlc;
  }
  if (name == "uncoded") {
    return Family::uncoded;
  }
  throw UsageError("unknown code family '" + std::string(name) + "'; " + k_descriptor_grammar);
}

} // namespace

std::string_view to_string(Family f)
{
  switch (f) {
  case Family::uncoded:
    return "uncoded";
  case Family::rlc:
    return "rlc";
  case Family::maxspan:
    return "maxspan";
  case Family::erlc:
    return "erlc";
  }
  return "?";
}

std::string to_key_value(const CodeParams& p)
{
  std::ostringstream out;
  out << "family=" << to_string(p.family) << '\n';
  out << "field_m=" << p.field_m << '\n';
  out << "u=" << p.u << '\n';
  out << "v=" << p.v << '\n';
  out << "delta=" << p.delta << '\n';
  out << "T=" << p.T << '\n';
  out << "k=" << p.k << '\n';
  out << "n=" << p.n << '\n';
  out << "seed=" << p.seed << '\n';
  return out.str();
}

std::string label(const CodeParams& p)
{
  std::string out = descriptor(p);
  std::replace(out.begin(), out.end(), ',', ';');
  return out;
}

CodeParams from_key_value(std::string_view text)
{
  CodeParams p;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("expected key=value, got '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "family") {
      p.family = parse_family(value);
    } else if (key == "field_m") {
      p.field_m = parse_int<unsigned>(value, key);
    } else if (key == "u") {
      p.u = parse_int<int>(value, key);
    } else if (key == "v") {
      p.v = parse_int<int>(value, key);
    } else if (key == "delta") {
      p.delta = parse_int<int>(value, key);
    } else if (key == "T") {
      p.T = parse_int<int>(value, key);
    } else if (key == "k") {
      p.k = parse_int<int>(value, key);
    } else if (key == "n") {
      p.n = parse_int<int>(value, key);
    } else if (key == "seed") {
      p.seed = parse_int<std::uint64_t>(value, key);
    } else {
      throw UsageError("unknown key '" + std::string(key) + "'");
    }
  }
  return p;
}

CodeDescriptor parse_descriptor(std::string_view text)
{
  text = trim(text);
  const auto colon = text.find(':');
  CodeDescriptor d;
  d.params.family = parse_family(text.substr(0, colon));
  std::map<std::string, std::string, std::less<>> kv;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find_first_of(",;");
      const auto item = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw UsageError("expected key=value in '" + std::string(text) + "'; " + k_descriptor_grammar);
      }
      kv.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    }
  }

  auto take = [&](std::string_view key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) {
      return std::nullopt;
    }
    std::string value = it->second;
    kv.erase(it);
    return value;
  };
  auto require = [&](std::string_view key) {
    auto value = take(key);
    if (!value) {
      throw UsageError("missing '" + std::string(key) + "' in '" + std::string(text) + "'; " + k_descriptor_grammar);
    }
    return parse_int<int>(*value, key);
  };

  auto& p = d.params;
  switch (p.family) {
  case Family::erlc:
    p.u = require("u");
    p.v = require("v");
    p.delta = require("delta");
    p.T = require("T");
    break;
  case Family::maxspan:
    p.u = require("B");
    p.T = require("T");
    p.v = p.T - p.u;
    p.delta = p.T;
    break;
  case Family::rlc:
    p.k = require("k");
    p.n = require("n");
    p.T = require("T");
    break;
  case Family::uncoded:
    break;
  }
  if (auto seed = take("seed")) {
    p.seed = parse_int<std::uint64_t>(*seed, "seed");
    d.has_seed = true;
  }
  if (!kv.empty()) {
    throw UsageError("unexpected key '" + kv.begin()->first + "' in '" + std::string(text) + "'; " +
                     k_descriptor_grammar);
  }
  return d;
}

std::string descriptor(const CodeParams& p, bool with_seed)
{
  std::ostringstream out;
  out << to_string(p.family);
  switch (p.family) {
  case Family::erlc:
    out << ":u=" << p.u << ",v=" << p.v << ",delta=" << p.delta << ",T=" << p.T;
    break;
  case Family::maxspan:
    out << ":B=" << p.u << ",T=" << p.T;
    break;
  case Family::rlc:
    out << ":k=" << p.k << ",n=" << p.n << ",T=" << p.T;
    break;
  case Family::uncoded:
    break;
  }
  if (with_seed) {
    out << (p.family == Family::uncoded ? ":" : ",") << "seed=" << p.seed;
  }
  return out.str();
}

const gf::FieldMatrix& CodeSpec::g(int j) const
{
  if (j < 1 || j > static_cast<int>(g_.size())) {
    throw ContractViolation("G_j index out of range");
  }
  return g_[static_cast<std::size_t>(j - 1)];
}

const gf::FieldMatrix& CodeSpec::h(int j) const
{
  if (j < 0 || j >= static_cast<int>(h_.size())) {
    throw ContractViolation("H_j index out of range");
  }
  return h_[static_cast<std::size_t>(j)];
}

const gf::FieldMatrix& CodeSpec::q(int j) const
{
  if (j < 0 || j >= static_cast<int>(q_.size())) {
    throw ContractViolation("Q_j index out of range");
  }
  return q_[static_cast<std::size_t>(j)];
}

void CodeSpec::assemble_taps()
{
  const std::size_t k = source_size();
  const std::size_t p = parity_size();
  taps_.clear();
  tap_rows_.clear();
  if (p == 0) {
    memory_ = 0;
    taps_.emplace_back(k, 0);
    tap_rows_.emplace_back();
    return;
  }
  memory_ = params_.T;
  for (int j = 0; j <= memory_; ++j) {
    gf::FieldMatrix tap(k, p);
    std::vector<std::size_t> rows;
    if (family() == Family::rlc) {
      tap = q_[static_cast<std::size_t>(j)];
      for (std::size_t a = 0; a < k; ++a) {
        rows.push_back(a);
      }
    } else {
      const int hj = j - params_.delta;
      if (hj >= 0 && hj < static_cast<int>(h_.size())) {
        const auto& h = h_[static_cast<std::size_t>(hj)];
        for (std::size_t a = 0; a < static_cast<std::size_t>(u_); ++a) {
          for (std::size_t r = 0; r < p; ++r) {
            tap(a, r) = h(a, r);
          }
          rows.push_back(a);
        }
      }
      if (j >= 1 && j <= static_cast<int>(g_.size())) {
        const auto& g = g_[static_cast<std::size_t>(j - 1)];
        for (std::size_t a = 0; a < static_cast<std::size_t>(v_); ++a) {
          for (std::size_t r = 0; r < p; ++r) {
            tap(static_cast<std::size_t>(u_) + a, r) = g(a, r);
          }
          rows.push_back(static_cast<std::size_t>(u_) + a);
        }
      }
    }
    taps_.push_back(std::move(tap));
    tap_rows_.push_back(std::move(rows));
  }
}

CodeSpec build_erlc_impl(const CodeParams& params, bool identity_h0)
{
  const int u = params.u;
  const int v = params.v;
  const int delta = params.delta;
  const int T = params.T;
  if (u < 1 || v < 0 || T < 0 || delta < 0 || delta > T) {
    throw ParameterError("erlc parameters need u >= 1, v >= 0, 0 <= delta <= T (got u=" + std::to_string(u) +
                         ", v=" + std::to_string(v) + ", delta=" + std::to_string(delta) +
                         ", T=" + std::to_string(T) + ")");
  }
  CodeSpec spec;
  spec.params_ = params;
  spec.u_ = u;
  spec.v_ = v;
  spec.parity_ = static_cast<std::size_t>(u);
  spec.field_ = std::make_shared<const gf::Field>(params.field_m);
  const auto& field = *spec.field_;
  const auto uu = static_cast<std::size_t>(u);
  for (int j = 1; j <= T - 1; ++j) {
    spec.g_.push_back(gf::seeded_random_matrix(field, static_cast<std::size_t>(v), uu, rng::derive(params.seed, "G", j)));
  }
  for (int j = 0; j <= T - delta; ++j) {
    if (j == 0 && identity_h0) {
      spec.h_.push_back(gf::FieldMatrix::identity(uu));
    } else {
      spec.h_.push_back(gf::seeded_random_matrix(field, uu, uu, rng::derive(params.seed, "H", j)));
    }
  }
  spec.assemble_taps();
  return spec;
}

CodeSpec build_rlc_impl(const CodeParams& params, int attempt)
{
  CodeSpec spec;
  spec.params_ = params;
  spec.u_ = params.k;
  spec.v_ = 0;
  spec.parity_ = static_cast<std::size_t>(params.n - params.k);
  spec.resamples_ = attempt;
  spec.field_ = std::make_shared<const gf::Field>(params.field_m);
  const std::uint64_t sample_seed = rng::derive(params.seed, "rlc", static_cast<std::uint64_t>(attempt));
  for (int j = 0; j <= params.T; ++j) {
    spec.q_.push_back(gf::seeded_random_matrix(*spec.field_, static_cast<std::size_t>(params.k), spec.parity_,
                                               rng::derive(sample_seed, "Q", j)));
  }
  spec.assemble_taps();
  return spec;
}

CodeSpec build_erlc(int u, int v, int delta, int T, unsigned field_m, std::uint64_t seed, ShiftedParity h0)
{
  CodeParams p;
  p.family = Family::erlc;
  p.u = u;
  p.v = v;
  p.delta = delta;
  p.T = T;
  p.field_m = field_m;
  p.seed = seed;
  return build_erlc_impl(p, h0 == ShiftedParity::identity);
}

CodeSpec build_maxspan(int B, int T, unsigned field_m, std::uint64_t seed)
{
  if (B < 1 || B > T) {
    throw ParameterError("maxspan needs 1 <= B <= T (got B=" + std::to_string(B) + ", T=" + std::to_string(T) + ")");
  }
  CodeParams p;
  p.family = Family::maxspan;
  p.u = B;
  p.v = T - B;
  p.delta = T;
  p.T = T;
  p.field_m = field_m;
  p.seed = seed;
  return build_erlc_impl(p, true);
}

CodeSpec build_rlc(int k, int n, int T, unsigned field_m, std::uint64_t seed)
{
  if (k < 1 || k >= n || T < 0) {
    throw ParameterError("rlc needs 1 <= k < n and T >= 0 (got k=" + std::to_string(k) + ", n=" + std::to_string(n) +
                         ", T=" + std::to_string(T) + ")");
  }
  CodeParams p;
  p.family = Family::rlc;
  p.k = k;
  p.n = n;
  p.T = T;
  p.field_m = field_m;
  p.seed = seed;
  if (T > k_rlc_verify_max_delay) {
    return build_rlc_impl(p, 0);
  }
  const int target = metrics::singleton_column_distance(k, n, T);
  for (int attempt = 0; attempt <= k_max_rlc_resamples; ++attempt) {
    CodeSpec spec = build_rlc_impl(p, attempt);
    const auto d = metrics::column_distance_oracle(spec, target);
    // d is the first failing weight at or below target; nullopt means none.
    if (!d || *d == target) {
      return spec;
    }
  }
  throw ConstructionError("rlc construction failed column-distance verification after " +
                          std::to_string(k_max_rlc_resamples) + " resamples (seed " + std::to_string(seed) + ")");
}

CodeSpec build_uncoded(unsigned field_m, std::uint64_t seed)
{
  CodeSpec spec;
  spec.params_.family = Family::uncoded;
  spec.params_.field_m = field_m;
  spec.params_.seed = seed;
  spec.u_ = 1;
  spec.v_ = 0;
  spec.parity_ = 0;
  spec.field_ = std::make_shared<const gf::Field>(field_m);
  spec.assemble_taps();
  return spec;
}

CodeSpec build(const CodeParams& p)
{
  switch (p.family) {
  case Family::erlc:
    return build_erlc(p.u, p.v, p.delta, p.T, p.field_m, p.seed);
  case Family::maxspan:
    return build_maxspan(p.u, p.T, p.field_m, p.seed);
  case Family::rlc:
    return build_rlc(p.k, p.n, p.T, p.field_m, p.seed);
  case Family::uncoded:
    return build_uncoded(p.field_m, p.seed);
  }
  throw ParameterError("unknown family");
}

std::vector<gf::Element> ChannelPacket::systematic() const
{
  std::vector<gf::Element> out(u_part);
  out.insert(out.end(), v_part.begin(), v_part.end());
  return out;
}

void SourceHistory::push(const SourcePacket& s)
{
  if (s.time != next_) {
    throw ContractViolation("source history gap: expected time " + std::to_string(next_) + ", got " +
                            std::to_string(s.time));
  }
  std::vector<gf::Element> flat(s.u_part);
  flat.insert(flat.end(), s.v_part.begin(), s.v_part.end());
  packets_.push_back(std::move(flat));
  while (packets_.size() > depth_) {
    packets_.pop_front();
  }
  ++next_;
}

bool SourceHistory::covers(std::int64_t t) const noexcept
{
  return t < 0 || (t < next_ && t >= next_ - static_cast<std::int64_t>(packets_.size()));
}

gf::Element SourceHistory::at(std::int64_t t, std::size_t a) const
{
  if (t < 0) {
    return 0;
  }
  if (!covers(t)) {
    throw ContractViolation("source history does not retain time " + std::to_string(t));
  }
  return packets_[static_cast<std::size_t>(t - (next_ - static_cast<std::int64_t>(packets_.size())))].at(a);
}

ChannelPacket encode(const CodeSpec& spec, const SourceHistory& history, const SourcePacket& s)
{
  if (s.u_part.size() != static_cast<std::size_t>(spec.u()) || s.v_part.size() != static_cast<std::size_t>(spec.v())) {
    throw ContractViolation("source packet shape does not match the code");
  }
  if (s.time != history.next_time()) {
    throw ContractViolation("history ends at " + std::to_string(history.next_time() - 1) + " but packet time is " +
                            std::to_string(s.time));
  }
  if (spec.memory() > 0 && !history.covers(s.time - spec.memory())) {
    throw ContractViolation("history too short for memory " + std::to_string(spec.memory()));
  }
  const auto u = static_cast<std::size_t>(spec.u());
  auto lookup = [&](std::int64_t t, std::size_t a) -> gf::Element {
    if (t == s.time) {
      return a < u ? s.u_part[a] : s.v_part[a - u];
    }
    return history.at(t, a);
  };
  ChannelPacket x;
  x.time = s.time;
  x.u_part = s.u_part;
  x.v_part = s.v_part;
  x.parity.assign(spec.parity_size(), 0);
  compute_parity(spec, s.time, lookup, x.parity);
  return x;
}

Encoder::Encoder(const CodeSpec& spec) : spec_(&spec), history_(static_cast<std::size_t>(spec.memory())) {}

ChannelPacket Encoder::push(const SourcePacket& s)
{
  ChannelPacket x = encode(*spec_, history_, s);
  history_.push(s);
  return x;
}

gf::FieldMatrix truncated_generator(const CodeSpec& spec, int T)
{
  if (T < 0) {
    throw ParameterError("truncation length must be >= 0");
  }
  const std::size_t k = spec.source_size();
  const std::size_t n = spec.channel_size();
  const std::size_t blocks = static_cast<std::size_t>(T) + 1;
  gf::FieldMatrix g(k * blocks, n * blocks);
  for (std::size_t a = 0; a < blocks; ++a) {
    for (std::size_t b = a; b < blocks; ++b) {
      const auto lag = static_cast<int>(b - a);
      if (lag == 0) {
        for (std::size_t i = 0; i < k; ++i) {
          g(a * k + i, b * n + i) = 1;
        }
      }
      if (lag > spec.memory()) {
        continue;
      }
      const auto& tap = spec.tap(lag);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t r = 0; r < tap.cols(); ++r) {
          g(a * k + i, b * n + k + r) = tap(i, r);
        }
      }
    }
  }
  return g;
}

SourcePacket make_source_packet(const CodeSpec& spec, std::int64_t time, std::span<const gf::Element> symbols)
{
  if (symbols.size() != spec.source_size()) {
    throw ContractViolation("source symbol count does not match the code");
  }
  SourcePacket s;
  s.time = time;
  const auto u = static_cast<std::size_t>(spec.u());
  s.u_part.assign(symbols.begin(), symbols.begin() + static_cast<std::ptrdiff_t>(u));
  s.v_part.assign(symbols.begin() + static_cast<std::ptrdiff_t>(u), symbols.end());
  return s;
}

} // namespace streamcode
