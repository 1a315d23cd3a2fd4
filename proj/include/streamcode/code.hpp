#pragma once

#include "streamcode/gf.hpp"

#include <boost/rational.hpp>

#include <algorithm>

#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace streamcode {

using Rational = boost::rational<std::int64_t>;

enum class Family
{
  uncoded,
  rlc,     ///< systematic random linear convolutional code, memory T
  maxspan, ///< repetition-embedded construction: u = B, v = T - B, shift T, H_0 = I
  erlc,    ///< embedded random linear code with parity shift delta
};

std::string_view to_string(Family f);

/// Everything needed to re-derive a code. Generator matrices are never
/// stored; they follow from the seed.
struct CodeParams
{
  Family family = Family::erlc;
  int u = 0;     ///< urgent sub-symbols per packet (maxspan: B)
  int v = 0;     ///< non-urgent sub-symbols per packet
  int delta = 0; ///< parity shift
  int T = 0;     ///< decoding delay
  int k = 0;     ///< rlc source sub-symbols
  int n = 0;     ///< rlc channel sub-symbols
  unsigned field_m = 16;
  std::uint64_t seed = 0;

  friend bool operator==(const CodeParams&, const CodeParams&) = default;
};

/// Key-value text ("family=erlc\nfield_m=16\nu=11\n..."), one key per line.
std::string to_key_value(const CodeParams& p);
CodeParams from_key_value(std::string_view text);

/// Compact descriptor: `erlc:u=11,v=1,delta=10,T=12[,seed=..]`,
/// `maxspan:B=11,T=12`, `rlc:k=12,n=23,T=12`, `uncoded`.
struct CodeDescriptor
{
  CodeParams params;
  bool has_seed = false;
};
CodeDescriptor parse_descriptor(std::string_view text);
std::string descriptor(const CodeParams& p, bool with_seed = false);
/// Descriptor with ';' between keys, safe as a single CSV field. Parses
/// like the descriptor itself.
std::string label(const CodeParams& p);

/// Grammar reminder included in usage errors.
extern const char* const k_descriptor_grammar;

/// One concrete code instance: parameters plus the sampled generator blocks.
///
/// Sub-symbols of a source packet are indexed [u-part..., v-part...]. For rlc
/// and uncoded codes every source sub-symbol lives in the u-part.
class CodeSpec
{
public:
  const CodeParams& params() const noexcept { return params_; }
  Family family() const noexcept { return params_.family; }
  int u() const noexcept { return u_; }
  int v() const noexcept { return v_; }
  int delta() const noexcept { return params_.delta; }
  int delay() const noexcept { return params_.T; }
  std::uint64_t seed() const noexcept { return params_.seed; }

  std::size_t source_size() const noexcept { return static_cast<std::size_t>(u_ + v_); }
  std::size_t parity_size() const noexcept { return parity_; }
  std::size_t channel_size() const noexcept { return source_size() + parity_; }
  /// Largest lag j with a nonzero parity tap.
  int memory() const noexcept { return memory_; }
  Rational rate() const { return {static_cast<std::int64_t>(source_size()), static_cast<std::int64_t>(channel_size())}; }

  const gf::Field& field() const noexcept { return *field_; }
  const std::shared_ptr<const gf::Field>& field_ptr() const noexcept { return field_; }

  /// v x u block applied to v[i-j], j in [1, T-1].
  const gf::FieldMatrix& g(int j) const;
  /// u x u block applied to u[i-delta-j], j in [0, T-delta].
  const gf::FieldMatrix& h(int j) const;
  /// k x (n-k) block applied to s[i-j] for rlc codes, j in [0, T].
  const gf::FieldMatrix& q(int j) const;

  /// Combined k x (n-k) map from s[i-j] to the parity of x[i], j in [0, memory()].
  const gf::FieldMatrix& tap(int j) const { return taps_.at(static_cast<std::size_t>(j)); }
  /// Source indices whose row in tap(j) can be nonzero.
  std::span<const std::size_t> tap_rows(int j) const { return tap_rows_.at(static_cast<std::size_t>(j)); }

  /// Random resamples an rlc construction needed to pass verification.
  int resamples() const noexcept { return resamples_; }

  /// Descriptor string without seed, e.g. `erlc:u=11,v=1,delta=10,T=12`.
  std::string id() const { return descriptor(params_); }

private:
  friend CodeSpec build_erlc_impl(const CodeParams&, bool);
  friend CodeSpec build_rlc_impl(const CodeParams&, int);
  friend CodeSpec build_uncoded(unsigned, std::uint64_t);

  void assemble_taps();

  CodeParams params_;
  int u_ = 0;
  int v_ = 0;
  std::size_t parity_ = 0;
  int memory_ = 0;
  int resamples_ = 0;
  std::shared_ptr<const gf::Field> field_;
  std::vector<gf::FieldMatrix> g_; // index j - 1
  std::vector<gf::FieldMatrix> h_;
  std::vector<gf::FieldMatrix> q_;
  std::vector<gf::FieldMatrix> taps_;
  std::vector<std::vector<std::size_t>> tap_rows_;
};

enum class ShiftedParity
{
  random,   ///< H_0 sampled like every other block
  identity, ///< H_0 forced to the identity (repetition of u)
};

CodeSpec build_erlc(int u, int v, int delta, int T, unsigned field_m, std::uint64_t seed,
                    ShiftedParity h0 = ShiftedParity::random);
CodeSpec build_maxspan(int B, int T, unsigned field_m, std::uint64_t seed);
/// Verifies the column distance with the brute-force oracle when T <= 12 and
/// resamples (up to 8 times) if the sample falls short.
CodeSpec build_rlc(int k, int n, int T, unsigned field_m, std::uint64_t seed);
CodeSpec build_uncoded(unsigned field_m = 16, std::uint64_t seed = 0);
CodeSpec build(const CodeParams& p);

struct SourcePacket
{
  std::int64_t time = 0;
  std::vector<gf::Element> u_part;
  std::vector<gf::Element> v_part;
};

struct ChannelPacket
{
  std::int64_t time = 0;
  std::vector<gf::Element> u_part;
  std::vector<gf::Element> v_part;
  std::vector<gf::Element> parity;

  /// Systematic part in source index order.
  std::vector<gf::Element> systematic() const;
};

/// Past source packets an encoder may reference. Times before 0 read as zero.
class SourceHistory
{
public:
  explicit SourceHistory(std::size_t depth) : depth_(depth) {}

  /// Appends the packet for the next time step. Throws ContractViolation on a gap.
  void push(const SourcePacket& s);

  /// Sub-symbol a of s[t]; zero for t < 0; ContractViolation if not retained.
  gf::Element at(std::int64_t t, std::size_t a) const;
  bool covers(std::int64_t t) const noexcept;
  std::int64_t next_time() const noexcept { return next_; }

private:
  std::size_t depth_;
  std::int64_t next_ = 0;
  std::deque<std::vector<gf::Element>> packets_; // times [next_ - size, next_)
};

/// Parity of x[i], reading source sub-symbols through `source(t, a)`.
/// Shared by the streaming encoder and the simulator's lazy path.
template <class SourceLookup>
void compute_parity(const CodeSpec& spec, std::int64_t i, SourceLookup&& source, std::span<gf::Element> out)
{
  const auto& field = spec.field();
  std::fill(out.begin(), out.end(), gf::Element{0});
  const std::size_t p = spec.parity_size();
  if (p == 0) {
    return;
  }
  if (spec.family() == Family::rlc) {
    for (int j = 0; j <= spec.delay(); ++j) {
      const auto& q = spec.q(j);
      for (std::size_t a = 0; a < spec.source_size(); ++a) {
        const gf::Element s = source(i - j, a);
        if (s == 0) {
          continue;
        }
        for (std::size_t r = 0; r < p; ++r) {
          out[r] ^= field.mul(s, q(a, r));
        }
      }
    }
    return;
  }
  const int T = spec.delay();
  const std::size_t u = static_cast<std::size_t>(spec.u());
  const std::size_t v = static_cast<std::size_t>(spec.v());
  for (int j = 1; j <= T - 1; ++j) {
    const auto& g = spec.g(j);
    for (std::size_t a = 0; a < v; ++a) {
      const gf::Element s = source(i - j, u + a);
      if (s == 0) {
        continue;
      }
      for (std::size_t r = 0; r < p; ++r) {
        out[r] ^= field.mul(s, g(a, r));
      }
    }
  }
  for (int j = 0; j <= T - spec.delta(); ++j) {
    const auto& h = spec.h(j);
    for (std::size_t a = 0; a < u; ++a) {
      const gf::Element s = source(i - spec.delta() - j, a);
      if (s == 0) {
        continue;
      }
      for (std::size_t r = 0; r < p; ++r) {
        out[r] ^= field.mul(s, h(a, r));
      }
    }
  }
}

/// Encodes s (at time history.next_time()) given the retained history.
ChannelPacket encode(const CodeSpec& spec, const SourceHistory& history, const SourcePacket& s);

/// Stateful wrapper: keeps its own history and encodes a stream in order.
class Encoder
{
public:
  explicit Encoder(const CodeSpec& spec);
  ChannelPacket push(const SourcePacket& s);

private:
  const CodeSpec* spec_;
  SourceHistory history_;
};

/// Block upper-triangular generator for the first T+1 packets:
/// [x_0 .. x_T] = [s_0 .. s_T] * G. Shape k(T+1) x n(T+1).
gf::FieldMatrix truncated_generator(const CodeSpec& spec, int T);

/// Source packet from a flat sub-symbol vector in index order.
SourcePacket make_source_packet(const CodeSpec& spec, std::int64_t time, std::span<const gf::Element> symbols);

} // namespace streamcode
