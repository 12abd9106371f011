#ifndef STOCHKIN_RNG_HPP
#define STOCHKIN_RNG_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace stochkin {

/// Complete, serializable state of one pseudo-random stream. Restoring a
/// StreamState and drawing k values yields exactly the k values the original
/// stream would have produced next.
///
/// Serialized form: 24 bytes, little-endian, fields in declared order.
struct StreamState {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t counter = 0;  // 64-bit draws consumed so far

  static constexpr std::size_t kSerializedSize = 24;

  std::array<std::uint8_t, kSerializedSize> to_bytes() const;
  static StreamState from_bytes(std::span<const std::uint8_t> bytes);

  std::string to_hex() const;
  static StreamState from_hex(std::string_view hex);

  bool operator==(const StreamState&) const = default;
};

/// One replayable pseudo-random stream, backed by Philox4x32-10 in counter
/// mode: the key is the master seed, the 128-bit counter block is
/// (draw counter, stream id). Distinct stream ids under one master seed are
/// disjoint counter blocks, so streams never share output.
///
/// Draw strides (counter ticks consumed) are fixed per operation:
///   next_u64 / next_uniform / next_exponential / next_categorical : 1
///   next_normal : 2
///   next_gamma  : variable (rejection sampler), deterministic given state
class Stream {
 public:
  Stream(std::uint64_t master_seed, std::uint64_t stream_id)
      : state_{master_seed, stream_id, 0} {}
  explicit Stream(const StreamState& state) : state_(state) {}

  const StreamState& state() const { return state_; }

  /// Next 64 random bits; advances the counter by 1.
  std::uint64_t next_u64();

  /// Uniform on the open interval (0,1); never 0 or 1 exactly.
  double next_uniform();

  /// Exponential with the given rate (mean 1/rate) by inverse transform.
  /// rate must be positive.
  double next_exponential(double rate);

  /// Index j with probability weights[j]/total, via one uniform and a
  /// left-to-right cumulative scan. total must equal the positive sum of the
  /// non-negative weights.
  std::size_t next_categorical(std::span<const double> weights, double total);

  /// Standard normal via Box-Muller (no cached second value, so the stream
  /// state stays the complete description of what comes next).
  double next_normal();

  /// Gamma(shape, rate) by Marsaglia-Tsang, boosted for shape < 1.
  double next_gamma(double shape, double rate);

 private:
  StreamState state_;
};

inline Stream make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return Stream(master_seed, stream_id);
}

inline StreamState snapshot(const Stream& s) { return s.state(); }
inline Stream restore(const StreamState& state) { return Stream(state); }

}  // namespace stochkin

#endif
