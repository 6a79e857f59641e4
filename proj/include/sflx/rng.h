// Copyright 2026 The sflx Authors
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

#ifndef SFLX_RNG_H_
#define SFLX_RNG_H_

#include <cstdint>
#include <random>

namespace sflx {

// Reproducible random source, "sflx-rng v1": std::mt19937_64 seeded directly
// with the 64-bit seed (its output sequence is fixed by the standard), plus
// bounded-integer and real draws defined here rather than by the library's
// distributions, whose algorithms vary between implementations.
class Rng {
 public:
  static constexpr int kVersion = 1;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform on [0, bound) by rejection; bound must be > 0.
  std::uint64_t UniformBelow(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % bound;
  }

  // Uniform on [0, 1) with 53 random bits.
  double UniformUnit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1).
  double UniformOpenUnit() {
    double u;
    do {
      u = UniformUnit();
    } while (u == 0.0);
    return u;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sflx

#endif  // SFLX_RNG_H_
