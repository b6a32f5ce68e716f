// Copyright 2026 The privfed Authors.
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

#ifndef PRIVFED_RNG_H_
#define PRIVFED_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace privfed {

// Engine used for every seeded stream in the library.
using Rng = std::mt19937_64;

// Mixes a base seed with a list of stream coordinates (client, round,
// epoch, ...) into an independent 64-bit seed. SplitMix64 finalizer.
uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> coords);

// Uniform double in the open interval (0, 1), built from the top 53 bits of
// one engine draw so that the value is identical across standard libraries.
double uniform_open01(Rng& rng);

}  // namespace privfed

#endif  // PRIVFED_RNG_H_
