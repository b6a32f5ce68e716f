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

#include "privfed/laplace.h"

#include <cmath>

#include "privfed/error.h"

namespace privfed {

double laplace_from_uniform(double u, double scale) {
  if (u == 0.0) return 0.0;
  const double sign = u > 0.0 ? 1.0 : -1.0;
  // 1 - 2|u| is exact for u drawn on the 2^-54 grid, so log loses nothing.
  return -scale * sign * std::log(1.0 - 2.0 * std::abs(u));
}

double laplace_sample(Rng& rng, double scale) {
  return laplace_from_uniform(uniform_open01(rng) - 0.5, scale);
}

LaplaceSampler::LaplaceSampler(Rng& rng, double scale) : rng_(&rng), scale_(scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::kInput, "Laplace scale must be positive");
}

double LaplaceSampler::operator()() { return laplace_sample(*rng_, scale_); }

}  // namespace privfed
