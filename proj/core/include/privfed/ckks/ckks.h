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

#ifndef PRIVFED_CKKS_CKKS_H_
#define PRIVFED_CKKS_CKKS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "privfed/ckks/encoder.h"
#include "privfed/ckks/ntt.h"
#include "privfed/rng.h"

namespace privfed::ckks {

// Leveled CKKS restricted to what encrypted averaging needs: encode/encrypt,
// ciphertext addition, and plaintext-scalar multiplication with rescale.
// Ciphertexts stay degree one, so there are no evaluation keys.
//
// The last modulus in the chain is a special prime used only to shrink the
// encryption noise (fresh ciphertexts are produced modulo the full chain and
// then divided down by it). Data levels therefore run from
// modulus_bits.size() - 2 (fresh) down to 0.
struct CkksParams {
  size_t poly_degree = 8192;
  std::vector<int> modulus_bits = {60, 40, 40};
  int scale_log2 = 40;

  size_t slot_count() const { return poly_degree / 2; }
  double scale() const;

  // Throws kConfiguration if the parameters are unusable.
  void validate() const;

  static CkksParams standard();  // N = 8192, [60, 40, 40], 2^40
  static CkksParams reduced();        // N = 1024, [40, 30, 30], 2^30

  friend bool operator==(const CkksParams&, const CkksParams&) = default;
};

// Residues of one ring element modulo a prefix of the modulus chain, in
// coefficient order, prime-major.
class RnsPoly {
 public:
  RnsPoly() = default;
  RnsPoly(size_t degree, size_t prime_count);

  size_t degree() const { return degree_; }
  size_t prime_count() const { return prime_count_; }
  std::span<uint64_t> residues(size_t i) {
    return {data_.data() + i * degree_, degree_};
  }
  std::span<const uint64_t> residues(size_t i) const {
    return {data_.data() + i * degree_, degree_};
  }
  void drop_last_prime();

  friend bool operator==(const RnsPoly&, const RnsPoly&) = default;

 private:
  size_t degree_ = 0;
  size_t prime_count_ = 0;
  std::vector<uint64_t> data_;
};

// Immutable per-parameter-set state: primes, NTT tables, the embedding and
// CRT constants. Share one instance between threads.
class CkksContext {
 public:
  explicit CkksContext(CkksParams params);

  const CkksParams& params() const { return params_; }
  size_t degree() const { return params_.poly_degree; }
  size_t slot_count() const { return params_.slot_count(); }
  const std::vector<uint64_t>& primes() const { return primes_; }
  const NttTables& ntt(size_t prime) const { return ntt_[prime]; }
  const CanonicalEmbedding& embedding() const { return embedding_; }
  size_t top_level() const { return primes_.size() - 2; }
  uint64_t params_hash() const { return hash_; }

  // inverse of primes[j] modulo primes[i]
  uint64_t inv_prime(size_t j, size_t i) const { return inv_[j * primes_.size() + i]; }

  // Divides by the last prime of `poly` with rounding and drops it.
  void divide_round_by_last(RnsPoly& poly) const;

  // Centered integer value of each coefficient modulo the product of the
  // poly's primes, converted to long double.
  std::vector<long double> centered_lift(const RnsPoly& poly) const;

 private:
  CkksParams params_;
  std::vector<uint64_t> primes_;
  std::vector<NttTables> ntt_;
  CanonicalEmbedding embedding_;
  std::vector<uint64_t> inv_;
  uint64_t hash_ = 0;
};

using ContextPtr = std::shared_ptr<const CkksContext>;
ContextPtr make_context(const CkksParams& params);

struct SecretKey {
  std::vector<int8_t> coeffs;  // ternary
};

struct PublicKey {
  // (b, a) with b = -a*s + e modulo the full chain, stored in NTT form.
  RnsPoly b_ntt;
  RnsPoly a_ntt;
};

struct KeyPair {
  SecretKey secret;
  PublicKey public_key;
};

struct PlainPoly {
  RnsPoly poly;
  size_t level = 0;
  double scale = 1.0;
  uint32_t slot_fill = 0;
};

struct Ciphertext {
  std::array<RnsPoly, 2> c;
  size_t level = 0;
  double scale = 1.0;
  uint32_t slot_fill = 0;  // meaningful leading slots
};

KeyPair keygen(const CkksContext& ctx, Rng& rng);

// Encodes up to slot_count real values at the given scale on the top level.
PlainPoly encode(const CkksContext& ctx, std::span<const double> values, double scale);
std::vector<double> decode(const CkksContext& ctx, const PlainPoly& pt);

Ciphertext encrypt(const CkksContext& ctx, const PlainPoly& pt, const PublicKey& pk, Rng& rng);
PlainPoly decrypt(const CkksContext& ctx, const Ciphertext& ct, const SecretKey& sk);

// Requires equal level and scale; output keeps both.
Ciphertext add(const CkksContext& ctx, const Ciphertext& a, const Ciphertext& b);

// Multiplies every slot by `scalar` and rescales once; output level is one
// below the input. The scalar is encoded at the scale of the prime being
// dropped, so the output scale equals the input scale exactly.
Ciphertext mul_scalar_rescale(const CkksContext& ctx, const Ciphertext& ct, double scalar);

// Header (15 bytes, little-endian): params hash u64, level u8, log2(scale)
// u16, slot_fill u32; then the residues as u64, component-major, then
// prime-major, then coefficient order.
std::vector<uint8_t> serialize_ct(const CkksContext& ctx, const Ciphertext& ct);
Ciphertext deserialize_ct(const CkksContext& ctx, std::span<const uint8_t> bytes);

inline constexpr size_t kCiphertextHeaderBytes = 15;

}  // namespace privfed::ckks

#endif  // PRIVFED_CKKS_CKKS_H_
