// Copyright 2026 The ResGrasp Authors
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

#ifndef RESGRASP_NUMERICS_RNG_H_
#define RESGRASP_NUMERICS_RNG_H_

#include <cstdint>
#include <random>

namespace resgrasp {

// Seeded random stream. Two Rng objects built from the same (seed, stream_id)
// produce identical sequences on every platform: the engine is mt19937_64
// and the uniform/normal transforms are implemented here rather than with the
// implementation-defined <random> distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream_id = 0);

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n).
  int UniformInt(int n);
  // Standard normal (Marsaglia polar method).
  double Normal();

 private:
  uint64_t seed_;
  uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a (seed, stream) pair into a single well-scrambled 64-bit seed.
uint64_t MixSeed(uint64_t seed, uint64_t stream_id);

}  // namespace resgrasp

#endif  // RESGRASP_NUMERICS_RNG_H_
