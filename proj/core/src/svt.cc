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

#include "privfed/svt.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "privfed/error.h"
#include "privfed/laplace.h"

namespace privfed {

void SvtConfig::validate() const {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::kConfiguration, "svt fraction must lie in (0, 1]");
  }
  if (!(epsilon > 0.0)) throw Error(ErrorKind::kConfiguration, "svt epsilon must be positive");
  if (!(noise_var > 0.0)) throw Error(ErrorKind::kConfiguration, "svt noise_var must be positive");
  if (!(gamma > 0.0)) throw Error(ErrorKind::kConfiguration, "svt gamma must be positive");
  if (std::isnan(tau)) throw Error(ErrorKind::kConfiguration, "svt tau must be a number");
}

double noise_scale(double gamma, double epsilon) {
  if (!(gamma > 0.0) || !(epsilon > 0.0)) {
    throw Error(ErrorKind::kInput, "noise_scale needs positive gamma and epsilon");
  }
  return 2.0 * gamma / epsilon;
}

FlatVector svt_filter(std::span<const double> delta, size_t steps, const SvtConfig& cfg, Rng& rng) {
  if (steps == 0) throw Error(ErrorKind::kInput, "svt_filter needs at least one local step");
  cfg.validate();
  if (!all_finite(delta)) throw Error(ErrorKind::kInput, "svt_filter on a non-finite update");

  const size_t n = delta.size();
  const double step_count = static_cast<double>(steps);
  std::vector<double> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = std::clamp(delta[i] / step_count, -cfg.gamma, cfg.gamma);

  const double lambda = noise_scale(cfg.gamma, cfg.epsilon);
  const double threshold = cfg.tau + laplace_sample(rng, lambda);
  const auto cap = static_cast<size_t>(std::ceil(cfg.fraction * static_cast<double>(n)));

  std::vector<size_t> accepted;
  accepted.reserve(cap);
  for (size_t i = 0; i < n && accepted.size() < cap; ++i) {
    const double query = std::abs(x[i]) + laplace_sample(rng, 2.0 * lambda);
    if (query >= threshold) accepted.push_back(i);
  }

  const double value_scale = std::sqrt(cfg.noise_var / 2.0);
  FlatVector y(n, 0.0);
  for (size_t i : accepted) {
    const double noisy = x[i] + laplace_sample(rng, value_scale);
    y[i] = std::clamp(noisy, -cfg.gamma, cfg.gamma) * step_count;
  }
  return y;
}

}  // namespace privfed
