// Copyright 2026 The qvotes Authors. All Rights Reserved.
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

#ifndef QVOTES_RNG_H_
#define QVOTES_RNG_H_

#include <cstdint>
#include <random>

namespace qvotes {

// mt19937_64 output is fully specified by the standard, so sequences are
// reproducible across toolchains. Distributions are implemented here rather
// than taken from <random>, whose algorithms are implementation-defined.
using Rng = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t Mix64(std::uint64_t x);

// Seed of the substream for (vote count n, run index, stream index):
//   h = Mix64(master)
//   h = Mix64(h + 0x9e3779b97f4a7c15 + Mix64(key))   for key in (n, run, stream)
// Every (n, run, condition) gets its own stream, so results do not depend on
// which worker executes a run or in which order.
std::uint64_t SubstreamSeed(std::uint64_t master, std::uint64_t n,
                            std::uint64_t run, std::uint64_t stream);

Rng MakeSubstream(std::uint64_t master, std::uint64_t n, std::uint64_t run,
                  std::uint64_t stream);

// Uniform integer in [0, bound) without modulo bias (Lemire's method).
// bound must be positive.
std::uint64_t UniformBelow(Rng& rng, std::uint64_t bound);

// Uniform double in [0, 1) with 53 random bits.
double UniformUnit(Rng& rng);

}  // namespace qvotes

#endif  // QVOTES_RNG_H_
