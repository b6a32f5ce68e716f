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

#include "privfed/ckks/encoder.h"

#include <bit>
#include <cmath>
#include <numbers>

#include "privfed/error.h"

namespace privfed::ckks {

CanonicalEmbedding::CanonicalEmbedding(size_t degree) : n_(degree) {
  if (!std::has_single_bit(degree) || degree < 4) {
    throw Error(ErrorKind::kConfiguration, "ring degree must be a power of two >= 4");
  }
  twist_.resize(n_);
  roots_.resize(n_);
  bitrev_.resize(n_);
  const double pi = std::numbers::pi;
  for (size_t j = 0; j < n_; ++j) {
    twist_[j] = std::polar(1.0, pi * static_cast<double>(j) / static_cast<double>(n_));
    roots_[j] = std::polar(1.0, 2.0 * pi * static_cast<double>(j) / static_cast<double>(n_));
  }
  const int log_n = std::countr_zero(n_);
  for (size_t i = 0; i < n_; ++i) {
    size_t r = 0, x = i;
    for (int b = 0; b < log_n; ++b) {
      r = (r << 1) | (x & 1);
      x >>= 1;
    }
    bitrev_[i] = r;
  }
}

// In-place radix-2 DFT: A_k = sum_n a_n exp(+-2*pi*i*k*n/N), unnormalized.
void CanonicalEmbedding::fft(std::vector<std::complex<double>>& a, bool inverse) const {
  for (size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
  }
  for (size_t len = 2; len <= n_; len <<= 1) {
    const size_t stride = n_ / len;
    for (size_t start = 0; start < n_; start += len) {
      for (size_t j = 0; j < len / 2; ++j) {
        std::complex<double> w = roots_[j * stride];
        if (inverse) w = std::conj(w);
        const auto u = a[start + j];
        const auto v = a[start + j + len / 2] * w;
        a[start + j] = u + v;
        a[start + j + len / 2] = u - v;
      }
    }
  }
}

std::vector<double> CanonicalEmbedding::slots_to_coeffs(std::span<const double> slots) const {
  if (slots.size() > slot_count()) {
    throw Error(ErrorKind::kCapacity, "more values than slots");
  }
  std::vector<std::complex<double>> v(n_);
  for (size_t k = 0; k < slots.size(); ++k) {
    v[k] = slots[k];
    v[n_ - 1 - k] = slots[k];  // conjugate of a real value
  }
  fft(v, /*inverse=*/true);
  std::vector<double> coeffs(n_);
  const double inv_n = 1.0 / static_cast<double>(n_);
  for (size_t j = 0; j < n_; ++j) coeffs[j] = (v[j] * std::conj(twist_[j])).real() * inv_n;
  return coeffs;
}

std::vector<double> CanonicalEmbedding::coeffs_to_slots(std::span<const double> coeffs) const {
  if (coeffs.size() != n_) throw Error(ErrorKind::kStructural, "coefficient count must equal degree");
  std::vector<std::complex<double>> v(n_);
  for (size_t j = 0; j < n_; ++j) v[j] = coeffs[j] * twist_[j];
  fft(v, /*inverse=*/false);
  std::vector<double> slots(slot_count());
  for (size_t k = 0; k < slots.size(); ++k) slots[k] = v[k].real();
  return slots;
}

}  // namespace privfed::ckks
