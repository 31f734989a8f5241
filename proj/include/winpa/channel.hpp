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

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "winpa/config.hpp"
#include "winpa/errors.hpp"
#include "winpa/rng.hpp"

namespace winpa {

/// Kilobytes moved by one RB during one slot. rate [kbit/s] * slot [ms] is
/// bits; /8 gives bytes and /1000 kilobytes. With slot_ms = 1 this is R/8000.
constexpr double kb_per_slot(double rate_kbps, double slot_ms) { return rate_kbps * slot_ms / 8000.0; }

/// OFDMA time-frequency grid with one throughput sample per (slot, frequency,
/// slice). Each sample is a pure function of (seed, t, f, s) computed from a
/// counter-based hash of the "channel" stream key, so query order never
/// matters. The nominal horizon is materialized up front; later slots are
/// computed on demand from the same function.
class ChannelGrid {
 public:
  explicit ChannelGrid(const SimConfig& cfg)
      : n_freq_(cfg.n_freq),
        n_slices_(cfg.n_slices),
        horizon_(cfg.horizon_slots),
        slot_ms_(cfg.slot_ms),
        rate_min_(cfg.rate_min_kbps),
        rate_max_(cfg.rate_max_kbps),
        key_(derive_stream(cfg.seed, "channel").key()) {
    table_.resize(horizon_ * n_freq_ * n_slices_);
    for (std::size_t i = 0; i < table_.size(); ++i) table_[i] = sample(i);
  }

  std::size_t n_freq() const { return n_freq_; }
  std::size_t n_slices() const { return n_slices_; }
  std::size_t horizon_slots() const { return horizon_; }
  double slot_ms() const { return slot_ms_; }
  double rate_min() const { return rate_min_; }
  double rate_max() const { return rate_max_; }

  double rate_at(std::uint64_t t, std::size_t f, std::size_t s) const {
    if (f >= n_freq_ || s >= n_slices_) {
      throw Error(Errc::index_out_of_range,
                  fmt::format("rate_at(t={}, f={}, s={}) with F={}, slices={}", t, f, s, n_freq_, n_slices_));
    }
    const std::uint64_t idx = (t * n_freq_ + f) * n_slices_ + s;
    return t < horizon_ ? table_[idx] : sample(idx);
  }

  /// Kilobytes slice s would receive on RB (t, f).
  double transfer_kb(std::uint64_t t, std::size_t f, std::size_t s) const {
    return kb_per_slot(rate_at(t, f, s), slot_ms_);
  }

  /// Writes `t,f,s,rate_kbps` rows for slots [0, slots).
  void dump_csv(std::ostream& os, std::uint64_t slots) const {
    os << "t,f,s,rate_kbps\n";
    for (std::uint64_t t = 0; t < slots; ++t)
      for (std::size_t f = 0; f < n_freq_; ++f)
        for (std::size_t s = 0; s < n_slices_; ++s) fmt::print(os, "{},{},{},{}\n", t, f, s, rate_at(t, f, s));
  }

 private:
  double sample(std::uint64_t idx) const { return scale_unit(counter_unit(key_, idx), rate_min_, rate_max_); }

  std::size_t n_freq_;
  std::size_t n_slices_;
  std::size_t horizon_;
  double slot_ms_;
  double rate_min_;
  double rate_max_;
  std::uint64_t key_;
  std::vector<double> table_;
};

}  // namespace winpa
