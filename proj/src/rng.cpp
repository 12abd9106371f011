#include "stochkin/rng.hpp"

#include <cmath>

#include "stochkin/errors.hpp"

namespace stochkin {

namespace {

// Philox4x32 round and key-schedule constants (Salmon et al. 2011).
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline std::array<std::uint32_t, 4> philox4x32_10(
    std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

inline void put_u64_le(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline std::uint64_t get_u64_le(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

}  // namespace

std::array<std::uint8_t, StreamState::kSerializedSize> StreamState::to_bytes()
    const {
  std::array<std::uint8_t, kSerializedSize> out{};
  put_u64_le(out.data(), master_seed);
  put_u64_le(out.data() + 8, stream_id);
  put_u64_le(out.data() + 16, counter);
  return out;
}

StreamState StreamState::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kSerializedSize)
    throw DecodeError("StreamState: expected " +
                      std::to_string(kSerializedSize) + " bytes, got " +
                      std::to_string(bytes.size()));
  StreamState s;
  s.master_seed = get_u64_le(bytes.data());
  s.stream_id = get_u64_le(bytes.data() + 8);
  s.counter = get_u64_le(bytes.data() + 16);
  return s;
}

std::string StreamState::to_hex() const {
  static const char* digits = "0123456789abcdef";
  const auto bytes = to_bytes();
  std::string out;
  out.reserve(2 * kSerializedSize);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

StreamState StreamState::from_hex(std::string_view hex) {
  if (hex.size() != 2 * kSerializedSize)
    throw DecodeError("StreamState: expected " +
                      std::to_string(2 * kSerializedSize) +
                      " hex characters, got " + std::to_string(hex.size()));
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw DecodeError(std::string("StreamState: invalid hex character '") + c +
                      "'");
  };
  std::array<std::uint8_t, kSerializedSize> bytes{};
  for (std::size_t i = 0; i < kSerializedSize; ++i)
    bytes[i] =
        static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  return from_bytes(bytes);
}

std::uint64_t Stream::next_u64() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(state_.counter),
      static_cast<std::uint32_t>(state_.counter >> 32),
      static_cast<std::uint32_t>(state_.stream_id),
      static_cast<std::uint32_t>(state_.stream_id >> 32)};
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(state_.master_seed),
      static_cast<std::uint32_t>(state_.master_seed >> 32)};
  const auto out = philox4x32_10(ctr, key);
  ++state_.counter;
  return static_cast<std::uint64_t>(out[0]) |
         (static_cast<std::uint64_t>(out[1]) << 32);
}

double Stream::next_uniform() {
  // Top 53 bits, offset by half a ulp: values lie strictly inside (0,1) and
  // the double is exact, so draws are bit-stable across platforms.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::next_exponential(double rate) {
  if (!(rate > 0.0))
    throw ContractError("next_exponential: rate must be positive");
  return -std::log(next_uniform()) / rate;
}

std::size_t Stream::next_categorical(std::span<const double> weights,
                                     double total) {
  if (!(total > 0.0))
    throw ContractError("next_categorical: total weight must be positive");
  const double target = next_uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = weights.size();
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0.0) last_positive = j;
    cumulative += weights[j];
    if (target < cumulative) return j;
  }
  // Rounding pushed the target past the last partial sum; fall back to the
  // last index with positive weight.
  if (last_positive == weights.size())
    throw ContractError("next_categorical: all weights are zero");
  return last_positive;
}

double Stream::next_normal() {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

double Stream::next_gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw ContractError("next_gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    const double g = next_gamma(shape + 1.0, 1.0);
    const double u = next_uniform();
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    const double x = next_normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = next_uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

}  // namespace stochkin
