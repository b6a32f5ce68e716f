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

#ifndef PRIVFED_CKKS_MODARITH_H_
#define PRIVFED_CKKS_MODARITH_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace privfed::ckks {

// Word-size modular arithmetic for primes below 2^62.

inline uint64_t add_mod(uint64_t a, uint64_t b, uint64_t q) {
  const uint64_t s = a + b;
  return s >= q ? s - q : s;
}

inline uint64_t sub_mod(uint64_t a, uint64_t b, uint64_t q) { return a >= b ? a - b : a + q - b; }

inline uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t q) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % q);
}

// Precomputed quotient floor(w * 2^64 / q) for fast multiplication by a
// fixed operand w < q.
inline uint64_t shoup_precompute(uint64_t w, uint64_t q) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(w) << 64) / q);
}

inline uint64_t mul_mod_shoup(uint64_t a, uint64_t w, uint64_t w_shoup, uint64_t q) {
  const auto hi = static_cast<uint64_t>((static_cast<unsigned __int128>(a) * w_shoup) >> 64);
  const uint64_t r = a * w - hi * q;
  return r >= q ? r - q : r;
}

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t q);
uint64_t inv_mod(uint64_t a, uint64_t q);  // q prime

// Reduces a signed value into [0, q).
inline uint64_t reduce_signed(int64_t v, uint64_t q) {
  if (v >= 0) return static_cast<uint64_t>(v) % q;
  const uint64_t m = static_cast<uint64_t>(-(v + 1)) % q;  // avoids overflow at INT64_MIN
  return q - 1 - m;
}

// Deterministic Miller-Rabin for 64-bit integers.
bool is_prime(uint64_t n);

// One distinct prime q = 1 (mod 2 * poly_degree) per entry of `bit_sizes`,
// each the largest such prime below 2^bits.
std::vector<uint64_t> find_ntt_primes(std::span<const int> bit_sizes, size_t poly_degree);

// A primitive (2 * poly_degree)-th root of unity modulo q; the smallest one
// found by scanning generators 2, 3, ...
uint64_t find_primitive_root(uint64_t q, size_t poly_degree);

}  // namespace privfed::ckks

#endif  // PRIVFED_CKKS_MODARITH_H_
