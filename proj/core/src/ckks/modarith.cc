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

#include "privfed/ckks/modarith.h"

#include <algorithm>

#include "privfed/error.h"

namespace privfed::ckks {

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t q) {
  uint64_t result = 1 % q;
  base %= q;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, q);
    base = mul_mod(base, base, q);
    exp >>= 1;
  }
  return result;
}

uint64_t inv_mod(uint64_t a, uint64_t q) {
  if (a % q == 0) throw Error(ErrorKind::kInput, "zero has no modular inverse");
  return pow_mod(a, q - 2, q);
}

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<uint64_t> find_ntt_primes(std::span<const int> bit_sizes, size_t poly_degree) {
  const uint64_t step = 2 * static_cast<uint64_t>(poly_degree);
  std::vector<uint64_t> primes;
  for (int bits : bit_sizes) {
    if (bits < 20 || bits > 61) {
      throw Error(ErrorKind::kConfiguration, "modulus bit sizes must lie in [20, 61]");
    }
    const uint64_t upper = (uint64_t{1} << bits) - 1;
    const uint64_t lower = uint64_t{1} << (bits - 1);
    uint64_t q = upper - ((upper - 1) % step);  // largest q <= upper with q = 1 mod step
    bool found = false;
    for (; q > lower; q -= step) {
      if (std::find(primes.begin(), primes.end(), q) == primes.end() && is_prime(q)) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw Error(ErrorKind::kConfiguration,
                  "no NTT-friendly prime of " + std::to_string(bits) + " bits for this degree");
    }
    primes.push_back(q);
  }
  return primes;
}

uint64_t find_primitive_root(uint64_t q, size_t poly_degree) {
  const uint64_t order = 2 * static_cast<uint64_t>(poly_degree);
  if ((q - 1) % order != 0) throw Error(ErrorKind::kConfiguration, "prime is not NTT-friendly");
  for (uint64_t g = 2; g < q; ++g) {
    const uint64_t psi = pow_mod(g, (q - 1) / order, q);
    // psi has order exactly `order` iff psi^(order/2) = -1.
    if (pow_mod(psi, order / 2, q) == q - 1) return psi;
  }
  throw Error(ErrorKind::kConfiguration, "no primitive root found");
}

}  // namespace privfed::ckks
