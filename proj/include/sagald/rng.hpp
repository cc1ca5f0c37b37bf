// Copyright 2026 The sagald Authors.
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

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace sagald {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Maps a 128-bit counter and 64-bit key to 128 bits.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// SplitMix64 finalizer, used only to fold (seed, replication) into a key.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Purpose tags separating the substreams drawn at one step.
enum class StreamTag : std::uint32_t {
  kDirect = 1,     // direct chain transition input
  kMapRecord = 2,  // random-map noise record
  kResidual = 3,   // residual rejection sampler
  kInit = 4,       // initial-state draws
  kAux = 5,        // verification scans and other test-only draws
};

/// Identifies one independent substream: (master seed, replication) folded
/// into a key, plus the absolute step and a purpose tag.
struct SubstreamKey {
  std::uint64_t key = 0;
  std::uint64_t step = 0;
  StreamTag tag = StreamTag::kDirect;

  friend bool operator==(const SubstreamKey&, const SubstreamKey&) = default;
};

constexpr std::uint64_t replication_key(std::uint64_t seed,
                                        std::uint64_t replication) noexcept {
  return mix64(seed ^ mix64(replication + 0x632BE59BD9B4E019ull));
}

/// Sequential generator over one substream. The fourth counter word is the
/// block index, so a stream yields 2^32 blocks of 128 bits before wrapping.
/// Models std::uniform_random_bit_generator.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  explicit CounterStream(const SubstreamKey& id) noexcept
      : key_{static_cast<std::uint32_t>(id.key),
             static_cast<std::uint32_t>(id.key >> 32)},
        step_lo_(static_cast<std::uint32_t>(id.step)),
        step_hi_(static_cast<std::uint32_t>(id.step >> 32)),
        tag_(static_cast<std::uint32_t>(id.tag)) {}

  CounterStream(std::uint64_t seed, std::uint64_t replication,
                std::uint64_t step, StreamTag tag) noexcept
      : CounterStream(SubstreamKey{replication_key(seed, replication), step, tag}) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (lane_ == 2) {
      const auto out =
          Philox4x32::apply({step_lo_, step_hi_, tag_, block_++}, key_);
      buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
      buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
      lane_ = 0;
    }
    return buffer_[lane_++];
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on {0, ..., n-1} by multiply-shift.
  std::size_t index(std::size_t n) noexcept {
    const unsigned __int128 prod =
        static_cast<unsigned __int128>((*this)()) * n;
    return static_cast<std::size_t>(prod >> 64);
  }

  /// Standard normal by Box-Muller; pairs are cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = kTwoPi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  void fill_normal(std::span<double> out) noexcept {
    for (double& v : out) v = normal();
  }

  /// Uniform point in the closed unit ball of dimension out.size().
  void fill_unit_ball(std::span<double> out) noexcept {
    const std::size_t d = out.size();
    if (d == 1) {
      out[0] = 2.0 * uniform() - 1.0;
      return;
    }
    double norm_sq = 0.0;
    do {
      norm_sq = 0.0;
      for (double& v : out) {
        v = normal();
        norm_sq += v * v;
      }
    } while (norm_sq == 0.0);
    const double scale =
        std::pow(uniform(), 1.0 / static_cast<double>(d)) / std::sqrt(norm_sq);
    for (double& v : out) v *= scale;
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t step_lo_;
  std::uint32_t step_hi_;
  std::uint32_t tag_;
  std::uint32_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int lane_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sagald
