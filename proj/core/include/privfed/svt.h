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

#ifndef PRIVFED_SVT_H_
#define PRIVFED_SVT_H_

#include <cstddef>
#include <span>

#include "privfed/params.h"
#include "privfed/rng.h"

namespace privfed {

struct SvtConfig {
  double fraction = 0.9;   // share of components that may be released, (0, 1]
  double epsilon = 1.0;    // privacy budget
  double noise_var = 2.0;  // variance of the value perturbation
  double gamma = 0.01;     // clipping bound
  double tau = 1e-4;       // baseline selection threshold

  // Throws kConfiguration if any constraint is violated.
  void validate() const;
};

// Threshold noise scale 2 * gamma / epsilon.
double noise_scale(double gamma, double epsilon);

// Sparse-vector filter on a flattened client update.
//
//  1. x = delta / steps, clamped to [-gamma, gamma]
//  2. T = tau + Lap(lambda), lambda = noise_scale(gamma, epsilon)
//  3. scan i = 0, 1, ...: q_i = |x_i| + Lap(2 * lambda); accept when q_i >= T;
//     stop after ceil(fraction * n) acceptances or at the end of the vector
//  4. accepted: y_i = clamp(x_i + Lap(sqrt(noise_var / 2)), -gamma, gamma),
//     drawn in ascending index order; everything else is exactly zero
//  5. return y * steps
//
// Random draws are taken from `rng` in the order listed above.
FlatVector svt_filter(std::span<const double> delta, size_t steps, const SvtConfig& cfg, Rng& rng);

}  // namespace privfed

#endif  // PRIVFED_SVT_H_
