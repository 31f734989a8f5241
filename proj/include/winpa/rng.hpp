// Copyright 2026 The winpa-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "winpa/errors.hpp"

namespace winpa {

namespace rng_detail {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// 64-bit FNV-1a over the label bytes.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Top 53 bits as a double in [0, 1).
constexpr double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

}  // namespace rng_detail

/// Labeled, seeded random stream backed by xoshiro256**.
///
/// Derivation: key = mix64(seed) ^ fnv1a(label); the four state words are the
/// first four outputs of a SplitMix64 sequence started at key. The generator
/// is portable and fully specified here, so identical (seed, label) pairs
/// yield identical sequences on every platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string label)
      : label_(std::move(label)), key_(rng_detail::mix64(seed) ^ rng_detail::fnv1a(label_)) {
    std::uint64_t sm = key_;
    for (auto& word : state_) {
      sm += rng_detail::kGolden;
      word = rng_detail::mix64(sm);
    }
  }

  const std::string& label() const noexcept { return label_; }

  // Stable per-stream key, used for counter-based (order-free) sampling.
  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t next() noexcept {
    using rng_detail::rotl;
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double next_unit() noexcept { return rng_detail::to_unit(next()); }

  bool operator==(const RngStream&) const = default;

 private:
  std::string label_;
  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_{};
};

inline RngStream derive_stream(std::uint64_t seed, std::string label) {
  if (label.empty()) throw std::invalid_argument("derive_stream: empty label");
  return RngStream(seed, std::move(label));
}

/// Maps a unit sample onto [lo, hi]; the clamp absorbs rounding at the top end.
inline double scale_unit(double u, double lo, double hi) {
  if (lo > hi) throw Error(Errc::bad_interval, "lo > hi");
  if (lo == hi) return lo;
  return std::clamp(lo + (hi - lo) * u, lo, hi);
}

inline double uniform(RngStream& stream, double lo, double hi) {
  if (lo > hi) throw Error(Errc::bad_interval, "lo > hi");
  return scale_unit(stream.next_unit(), lo, hi);
}

/// Unbiased integer draw from the inclusive range [lo, hi].
inline std::int64_t uniform_int(RngStream& stream, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw Error(Errc::bad_interval, "lo > hi");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(stream.next());
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
  std::uint64_t x;
  do {
    x = stream.next();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

inline bool bernoulli(RngStream& stream, double p) { return stream.next_unit() < p; }

/// Order-free sample for a 64-bit counter under a stream key: a pure function
/// of (key, counter), independent of any cursor.
inline double counter_unit(std::uint64_t key, std::uint64_t counter) {
  using namespace rng_detail;
  return to_unit(mix64(key ^ mix64(counter * kGolden + 1)));
}

}  // namespace winpa
