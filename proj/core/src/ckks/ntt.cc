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

#include "privfed/ckks/ntt.h"

#include <bit>

#include "privfed/ckks/modarith.h"
#include "privfed/error.h"

namespace privfed::ckks {
namespace {

size_t bit_reverse(size_t x, int bits) {
  size_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

}  // namespace

NttTables::NttTables(uint64_t modulus, size_t degree) : q_(modulus), n_(degree) {
  if (!std::has_single_bit(degree) || degree < 2) {
    throw Error(ErrorKind::kConfiguration, "NTT degree must be a power of two");
  }
  const int log_n = std::countr_zero(degree);
  const uint64_t psi = find_primitive_root(q_, n_);
  const uint64_t psi_inv = inv_mod(psi, q_);
  psi_rev_.resize(n_);
  inv_psi_rev_.resize(n_);
  psi_rev_shoup_.resize(n_);
  inv_psi_rev_shoup_.resize(n_);
  uint64_t pw = 1, ipw = 1;
  for (size_t i = 0; i < n_; ++i) {
    const size_t r = bit_reverse(i, log_n);
    psi_rev_[r] = pw;
    inv_psi_rev_[r] = ipw;
    pw = mul_mod(pw, psi, q_);
    ipw = mul_mod(ipw, psi_inv, q_);
  }
  for (size_t i = 0; i < n_; ++i) {
    psi_rev_shoup_[i] = shoup_precompute(psi_rev_[i], q_);
    inv_psi_rev_shoup_[i] = shoup_precompute(inv_psi_rev_[i], q_);
  }
  n_inv_ = inv_mod(n_, q_);
  n_inv_shoup_ = shoup_precompute(n_inv_, q_);
}

void NttTables::forward(std::span<uint64_t> a) const {
  size_t t = n_;
  for (size_t m = 1; m < n_; m <<= 1) {
    t >>= 1;
    for (size_t i = 0; i < m; ++i) {
      const size_t j1 = 2 * i * t;
      const uint64_t w = psi_rev_[m + i];
      const uint64_t ws = psi_rev_shoup_[m + i];
      for (size_t j = j1; j < j1 + t; ++j) {
        const uint64_t u = a[j];
        const uint64_t v = mul_mod_shoup(a[j + t], w, ws, q_);
        a[j] = add_mod(u, v, q_);
        a[j + t] = sub_mod(u, v, q_);
      }
    }
  }
}

void NttTables::inverse(std::span<uint64_t> a) const {
  size_t t = 1;
  for (size_t m = n_; m > 1; m >>= 1) {
    const size_t h = m >> 1;
    size_t j1 = 0;
    for (size_t i = 0; i < h; ++i) {
      const uint64_t w = inv_psi_rev_[h + i];
      const uint64_t ws = inv_psi_rev_shoup_[h + i];
      for (size_t j = j1; j < j1 + t; ++j) {
        const uint64_t u = a[j];
        const uint64_t v = a[j + t];
        a[j] = add_mod(u, v, q_);
        a[j + t] = mul_mod_shoup(sub_mod(u, v, q_), w, ws, q_);
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
  for (auto& x : a) x = mul_mod_shoup(x, n_inv_, n_inv_shoup_, q_);
}

}  // namespace privfed::ckks
