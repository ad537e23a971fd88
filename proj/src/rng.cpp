#include "lgle/rng.hpp"

#include <cmath>
#include <numbers>

namespace lgle {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t stream_id_of(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(a + 0x632BE59BD9B4E019ULL) ^ (b + kGolden));
}

std::uint64_t stream_id_of(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  return stream_id_of(stream_id_of(a, b), c);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter) noexcept
    : seed_(seed), stream_id_(stream_id), counter_(counter) {
  key_ = mix64(mix64(seed ^ 0xD1B54A32D192ED03ULL) ^ mix64(stream_id + 0x8CB92BA72F3D8DD7ULL));
}

std::uint64_t RngStream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStream RngStream::child(std::uint64_t index) const noexcept {
  return RngStream(seed_, stream_id_of(stream_id_, index));
}

}  // namespace lgle
