#pragma once

#include <cstdint>

namespace lgle {

/// Counter-based random stream.
///
/// The i-th 64-bit output is a pure function of (seed, stream_id, i), so a
/// stream can be replayed from any position and distinct stream ids drawn
/// from one seed give independent sequences. Internally the pair
/// (seed, stream_id) is hashed into a key and outputs are the SplitMix64
/// finalizer applied to key + i * golden_gamma.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;

  /// Standard normal (Box-Muller, one output per pair of uniforms).
  double normal() noexcept;

  /// Independent child stream; the same (parent, index) always yields the
  /// same child.
  RngStream child(std::uint64_t index) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_;
  std::uint64_t key_;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combines indices into a single stream id (order-sensitive).
std::uint64_t stream_id_of(std::uint64_t a, std::uint64_t b) noexcept;
std::uint64_t stream_id_of(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept;

}  // namespace lgle
