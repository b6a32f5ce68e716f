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

#ifndef PRIVFED_LAPLACE_H_
#define PRIVFED_LAPLACE_H_

#include "privfed/rng.h"

namespace privfed {

// Inverse CDF of Laplace(0, scale) evaluated at u in (-1/2, 1/2):
//   x = -scale * sign(u) * ln(1 - 2|u|)
double laplace_from_uniform(double u, double scale);

// Draws Laplace(0, b) samples from a seeded stream, one engine draw each.
class LaplaceSampler {
 public:
  LaplaceSampler(Rng& rng, double scale);

  double scale() const { return scale_; }
  double operator()();

 private:
  Rng* rng_;
  double scale_;
};

// One Laplace(0, scale) draw from `rng`, consuming exactly one engine output.
double laplace_sample(Rng& rng, double scale);

}  // namespace privfed

#endif  // PRIVFED_LAPLACE_H_
