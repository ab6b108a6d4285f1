//
// Copyright 2026 The deepcand Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DEEPCAND_RNG_H_
#define DEEPCAND_RNG_H_

#include <cstdint>
#include <string_view>

namespace deepcand {

// Counter-based generator with named sub-streams.
//
// A stream is keyed by DeriveSeed(seed, stream_id). The i-th output (i >= 1)
// is Mix64(key + i * 0x9E3779B97F4A7C15), i.e. SplitMix64 started at the key,
// where Mix64 is the SplitMix64 finalizer (shifts 30/27/31, multipliers
// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). Stream ids are hashed with
// 64-bit FNV-1a. Sequences depend only on (seed, stream_id, call sequence).
//
// Values are single-owner; parallel work derives Child() streams up front.
class SeededRng {
 public:
  SeededRng(uint64_t seed, std::string_view stream_id)
      : key_(DeriveSeed(seed, stream_id)) {}

  // Mix64(Mix64(seed) ^ Fnv1a64(stream_id)).
  static uint64_t DeriveSeed(uint64_t seed, std::string_view stream_id);
  static uint64_t Mix64(uint64_t z);
  static uint64_t Fnv1a64(std::string_view s);

  // Stream keyed by (key(), stream_id); independent of how many values this
  // stream has produced.
  SeededRng Child(std::string_view stream_id) const {
    return SeededRng(key_, stream_id);
  }

  uint64_t key() const { return key_; }

  uint64_t NextU64() {
    counter_ += kGolden;
    return Mix64(key_ + counter_);
  }

  // Top 53 bits: k * 2^-53 in [0, 1).
  double Uniform();
  // (k + 0.5) * 2^-53 in (0, 1); never 0 or 1.
  double UniformOpen();
  // Unbiased integer in [0, n) by rejection; n must be > 0.
  uint64_t UniformIndex(uint64_t n);
  // Box-Muller, basic form: sqrt(-2 ln u1) * cos(2 pi u2) with u1, u2 drawn
  // in that order from UniformOpen(). One normal per call; the sine branch is
  // discarded so every call consumes exactly two outputs.
  double Gaussian();

 private:
  static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace deepcand

#endif  // DEEPCAND_RNG_H_
