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

#ifndef PRIVFED_CKKS_NTT_H_
#define PRIVFED_CKKS_NTT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace privfed::ckks {

// Negacyclic number-theoretic transform over Z_q[X]/(X^N + 1). Forward maps
// coefficients to evaluations at the odd powers of a primitive 2N-th root,
// in bit-reversed order; pointwise products then correspond to negacyclic
// convolution.
class NttTables {
 public:
  NttTables(uint64_t modulus, size_t degree);

  uint64_t modulus() const { return q_; }
  size_t degree() const { return n_; }

  void forward(std::span<uint64_t> a) const;
  void inverse(std::span<uint64_t> a) const;

 private:
  uint64_t q_;
  size_t n_;
  std::vector<uint64_t> psi_rev_, psi_rev_shoup_;
  std::vector<uint64_t> inv_psi_rev_, inv_psi_rev_shoup_;
  uint64_t n_inv_, n_inv_shoup_;
};

}  // namespace privfed::ckks

#endif  // PRIVFED_CKKS_NTT_H_
