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

#ifndef PRIVFED_CKKS_ENCODER_H_
#define PRIVFED_CKKS_ENCODER_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace privfed::ckks {

// Canonical embedding for Z[X]/(X^N + 1). Slot k holds the evaluation of the
// polynomial at w^(2k+1), w = exp(i*pi/N), for k < N/2; the remaining roots
// are the complex conjugates, which keeps real-valued input on real
// coefficients.
class CanonicalEmbedding {
 public:
  explicit CanonicalEmbedding(size_t degree);

  size_t degree() const { return n_; }
  size_t slot_count() const { return n_ / 2; }

  // Real polynomial coefficients whose embedding is `slots` (zero-padded).
  std::vector<double> slots_to_coeffs(std::span<const double> slots) const;
  std::vector<double> coeffs_to_slots(std::span<const double> coeffs) const;

 private:
  void fft(std::vector<std::complex<double>>& a, bool inverse) const;

  size_t n_;
  std::vector<std::complex<double>> twist_;  // w^n
  std::vector<std::complex<double>> roots_;  // exp(2*pi*i*j/N)
  std::vector<size_t> bitrev_;
};

}  // namespace privfed::ckks

#endif  // PRIVFED_CKKS_ENCODER_H_
