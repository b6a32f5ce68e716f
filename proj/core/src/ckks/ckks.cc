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

#include "privfed/ckks/ckks.h"

#include <bit>
#include <cmath>
#include <random>

#include "privfed/ckks/modarith.h"
#include "privfed/error.h"

namespace privfed::ckks {
namespace {

constexpr int kBinomialTerms = 21;  // centered binomial, sigma = sqrt(21 / 2) ~ 3.24

uint64_t fnv1a(uint64_t h, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<int8_t> sample_ternary(size_t n, Rng& rng) {
  std::uniform_int_distribution<int> dist(-1, 1);
  std::vector<int8_t> out(n);
  for (auto& v : out) v = static_cast<int8_t>(dist(rng));
  return out;
}

std::vector<int64_t> sample_error(size_t n, Rng& rng) {
  constexpr uint64_t mask = (uint64_t{1} << kBinomialTerms) - 1;
  std::vector<int64_t> out(n);
  for (auto& v : out) {
    const uint64_t x = rng();
    v = std::popcount(x & mask) - std::popcount((x >> kBinomialTerms) & mask);
  }
  return out;
}

template <typename Int>
RnsPoly small_to_rns(const CkksContext& ctx, std::span<const Int> coeffs, size_t prime_count) {
  RnsPoly p(ctx.degree(), prime_count);
  for (size_t i = 0; i < prime_count; ++i) {
    const uint64_t q = ctx.primes()[i];
    auto r = p.residues(i);
    for (size_t n = 0; n < coeffs.size(); ++n) r[n] = reduce_signed(coeffs[n], q);
  }
  return p;
}

void to_ntt(const CkksContext& ctx, RnsPoly& p) {
  for (size_t i = 0; i < p.prime_count(); ++i) ctx.ntt(i).forward(p.residues(i));
}

void from_ntt(const CkksContext& ctx, RnsPoly& p) {
  for (size_t i = 0; i < p.prime_count(); ++i) ctx.ntt(i).inverse(p.residues(i));
}

void add_inplace(const CkksContext& ctx, RnsPoly& a, const RnsPoly& b) {
  for (size_t i = 0; i < a.prime_count(); ++i) {
    const uint64_t q = ctx.primes()[i];
    auto x = a.residues(i);
    auto y = b.residues(i);
    for (size_t n = 0; n < x.size(); ++n) x[n] = add_mod(x[n], y[n], q);
  }
}

// out = a * b pointwise (both in NTT form).
RnsPoly mul_ntt(const CkksContext& ctx, const RnsPoly& a, const RnsPoly& b, size_t prime_count) {
  RnsPoly out(ctx.degree(), prime_count);
  for (size_t i = 0; i < prime_count; ++i) {
    const uint64_t q = ctx.primes()[i];
    auto x = a.residues(i);
    auto y = b.residues(i);
    auto z = out.residues(i);
    for (size_t n = 0; n < z.size(); ++n) z[n] = mul_mod(x[n], y[n], q);
  }
  return out;
}

void write_le(std::vector<uint8_t>& out, uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint64_t read_le(std::span<const uint8_t> in, size_t offset, int bytes) {
  uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<uint64_t>(in[offset + i]) << (8 * i);
  return v;
}

}  // namespace

double CkksParams::scale() const { return std::ldexp(1.0, scale_log2); }

void CkksParams::validate() const {
  if (!std::has_single_bit(poly_degree) || poly_degree < 16 || poly_degree > 65536) {
    throw Error(ErrorKind::kConfiguration, "poly_degree must be a power of two in [16, 65536]");
  }
  if (modulus_bits.size() < 2) {
    throw Error(ErrorKind::kConfiguration, "modulus chain needs at least two primes");
  }
  if (scale_log2 < 1) throw Error(ErrorKind::kConfiguration, "scale must be at least 2");
  if (scale_log2 >= modulus_bits[0] || scale_log2 > modulus_bits[1]) {
    throw Error(ErrorKind::kConfiguration, "scale leaves no headroom in the modulus chain");
  }
}

CkksParams CkksParams::standard() { return {8192, {60, 40, 40}, 40}; }

CkksParams CkksParams::reduced() { return {1024, {40, 30, 30}, 30}; }

RnsPoly::RnsPoly(size_t degree, size_t prime_count)
    : degree_(degree), prime_count_(prime_count), data_(degree * prime_count, 0) {}

void RnsPoly::drop_last_prime() {
  --prime_count_;
  data_.resize(degree_ * prime_count_);
}

CkksContext::CkksContext(CkksParams params)
    : params_((params.validate(), std::move(params))),
      primes_(find_ntt_primes(params_.modulus_bits, params_.poly_degree)),
      embedding_(params_.poly_degree) {
  ntt_.reserve(primes_.size());
  for (uint64_t q : primes_) ntt_.emplace_back(q, params_.poly_degree);
  const size_t k = primes_.size();
  inv_.assign(k * k, 0);
  for (size_t j = 0; j < k; ++j) {
    for (size_t i = 0; i < k; ++i) {
      if (i != j) inv_[j * k + i] = inv_mod(primes_[j] % primes_[i], primes_[i]);
    }
  }
  hash_ = 0xcbf29ce484222325ULL;
  hash_ = fnv1a(hash_, params_.poly_degree);
  for (uint64_t q : primes_) hash_ = fnv1a(hash_, q);
  hash_ = fnv1a(hash_, static_cast<uint64_t>(params_.scale_log2));
}

void CkksContext::divide_round_by_last(RnsPoly& poly) const {
  const size_t k = poly.prime_count();
  if (k < 2) throw Error(ErrorKind::kDepthExhausted, "no prime left to divide by");
  const uint64_t p = primes_[k - 1];
  const auto last = poly.residues(k - 1);
  for (size_t i = 0; i + 1 < k; ++i) {
    const uint64_t q = primes_[i];
    const uint64_t p_mod_q = p % q;
    const uint64_t p_inv = inv_prime(k - 1, i);
    auto r = poly.residues(i);
    for (size_t n = 0; n < r.size(); ++n) {
      // centered representative of the last residue, reduced mod q
      uint64_t c = last[n] % q;
      if (last[n] > p / 2) c = sub_mod(c, p_mod_q, q);
      r[n] = mul_mod(sub_mod(r[n], c, q), p_inv, q);
    }
  }
  poly.drop_last_prime();
}

std::vector<long double> CkksContext::centered_lift(const RnsPoly& poly) const {
  const size_t k = poly.prime_count();
  std::vector<long double> out(poly.degree());
  std::vector<uint64_t> v(k), w(k);
  // Mixed-radix digits of x from its residues (Garner).
  auto garner = [&](std::vector<uint64_t>& digits, auto residue) {
    for (size_t i = 0; i < k; ++i) {
      const uint64_t q = primes_[i];
      uint64_t t = residue(i);
      for (size_t j = 0; j < i; ++j) t = mul_mod(sub_mod(t, digits[j] % q, q), inv_prime(j, i), q);
      digits[i] = t;
    }
  };
  for (size_t n = 0; n < poly.degree(); ++n) {
    garner(v, [&](size_t i) { return poly.residues(i)[n]; });
    garner(w, [&](size_t i) {
      const uint64_t r = poly.residues(i)[n];
      return r == 0 ? 0 : primes_[i] - r;
    });
    // Whichever of x and Q - x is smaller is the magnitude.
    bool positive = true;
    for (size_t i = k; i-- > 0;) {
      if (v[i] != w[i]) {
        positive = v[i] < w[i];
        break;
      }
    }
    const auto& d = positive ? v : w;
    long double acc = 0;
    for (size_t i = k; i-- > 0;) acc = acc * static_cast<long double>(primes_[i]) + d[i];
    out[n] = positive ? acc : -acc;
  }
  return out;
}

ContextPtr make_context(const CkksParams& params) { return std::make_shared<const CkksContext>(params); }

KeyPair keygen(const CkksContext& ctx, Rng& rng) {
  const size_t n = ctx.degree();
  const size_t k = ctx.primes().size();
  KeyPair kp;
  kp.secret.coeffs = sample_ternary(n, rng);

  RnsPoly s = small_to_rns<int8_t>(ctx, kp.secret.coeffs, k);
  to_ntt(ctx, s);

  RnsPoly a(n, k);
  for (size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<uint64_t> dist(0, ctx.primes()[i] - 1);
    for (auto& x : a.residues(i)) x = dist(rng);
  }
  const auto e_coeffs = sample_error(n, rng);
  RnsPoly e = small_to_rns<int64_t>(ctx, e_coeffs, k);
  to_ntt(ctx, e);

  RnsPoly b = mul_ntt(ctx, a, s, k);
  for (size_t i = 0; i < k; ++i) {
    const uint64_t q = ctx.primes()[i];
    auto bi = b.residues(i);
    auto ei = e.residues(i);
    for (size_t j = 0; j < n; ++j) bi[j] = sub_mod(ei[j], bi[j], q);
  }
  kp.public_key = {std::move(b), std::move(a)};
  return kp;
}

PlainPoly encode(const CkksContext& ctx, std::span<const double> values, double scale) {
  if (values.size() > ctx.slot_count()) {
    throw Error(ErrorKind::kCapacity, std::to_string(values.size()) + " values exceed " +
                                          std::to_string(ctx.slot_count()) + " slots");
  }
  if (!(scale > 0.0)) throw Error(ErrorKind::kInput, "encoding scale must be positive");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInput, "cannot encode a non-finite value");
  }
  const std::vector<double> coeffs = ctx.embedding().slots_to_coeffs(values);
  std::vector<int64_t> rounded(coeffs.size());
  constexpr double kLimit = 0x1.0p62;
  for (size_t j = 0; j < coeffs.size(); ++j) {
    const double c = std::nearbyint(coeffs[j] * scale);
    if (!(std::abs(c) < kLimit)) throw Error(ErrorKind::kCapacity, "encoded coefficient overflows");
    rounded[j] = static_cast<int64_t>(c);
  }
  PlainPoly pt;
  pt.level = ctx.top_level();
  pt.poly = small_to_rns<int64_t>(ctx, rounded, pt.level + 1);
  pt.scale = scale;
  pt.slot_fill = static_cast<uint32_t>(values.size());
  return pt;
}

std::vector<double> decode(const CkksContext& ctx, const PlainPoly& pt) {
  const auto lifted = ctx.centered_lift(pt.poly);
  std::vector<double> coeffs(lifted.size());
  for (size_t j = 0; j < lifted.size(); ++j) {
    coeffs[j] = static_cast<double>(lifted[j] / static_cast<long double>(pt.scale));
  }
  return ctx.embedding().coeffs_to_slots(coeffs);
}

Ciphertext encrypt(const CkksContext& ctx, const PlainPoly& pt, const PublicKey& pk, Rng& rng) {
  const size_t n = ctx.degree();
  const size_t k = ctx.primes().size();
  if (pt.level != ctx.top_level() || pt.poly.prime_count() != ctx.top_level() + 1 ||
      pt.poly.degree() != n) {
    throw Error(ErrorKind::kState, "plaintext is not at the top level of this context");
  }
  if (pk.a_ntt.prime_count() != k || pk.a_ntt.degree() != n) {
    throw Error(ErrorKind::kState, "public key does not belong to this context");
  }
  const auto u_coeffs = sample_ternary(n, rng);
  RnsPoly u = small_to_rns<int8_t>(ctx, u_coeffs, k);
  to_ntt(ctx, u);

  Ciphertext ct;
  ct.c[0] = mul_ntt(ctx, pk.b_ntt, u, k);
  ct.c[1] = mul_ntt(ctx, pk.a_ntt, u, k);
  for (auto& c : ct.c) {
    from_ntt(ctx, c);
    const auto e = sample_error(n, rng);
    add_inplace(ctx, c, small_to_rns<int64_t>(ctx, e, k));
    ctx.divide_round_by_last(c);
  }
  add_inplace(ctx, ct.c[0], pt.poly);
  ct.level = ctx.top_level();
  ct.scale = pt.scale;
  ct.slot_fill = pt.slot_fill;
  return ct;
}

PlainPoly decrypt(const CkksContext& ctx, const Ciphertext& ct, const SecretKey& sk) {
  const size_t primes = ct.level + 1;
  if (ct.level > ctx.top_level() || ct.c[0].prime_count() != primes ||
      ct.c[1].prime_count() != primes || ct.c[0].degree() != ctx.degree()) {
    throw Error(ErrorKind::kState, "ciphertext does not belong to this context");
  }
  if (sk.coeffs.size() != ctx.degree()) throw Error(ErrorKind::kState, "secret key size mismatch");
  RnsPoly s = small_to_rns<int8_t>(ctx, sk.coeffs, primes);
  to_ntt(ctx, s);
  RnsPoly c1 = ct.c[1];
  to_ntt(ctx, c1);
  RnsPoly m = mul_ntt(ctx, c1, s, primes);
  from_ntt(ctx, m);
  add_inplace(ctx, m, ct.c[0]);
  return {std::move(m), ct.level, ct.scale, ct.slot_fill};
}

Ciphertext add(const CkksContext& ctx, const Ciphertext& a, const Ciphertext& b) {
  if (a.level != b.level) throw Error(ErrorKind::kState, "add: ciphertext levels differ");
  if (a.scale != b.scale) throw Error(ErrorKind::kState, "add: ciphertext scales differ");
  Ciphertext out = a;
  add_inplace(ctx, out.c[0], b.c[0]);
  add_inplace(ctx, out.c[1], b.c[1]);
  out.slot_fill = std::max(a.slot_fill, b.slot_fill);
  return out;
}

Ciphertext mul_scalar_rescale(const CkksContext& ctx, const Ciphertext& ct, double scalar) {
  if (ct.level == 0) {
    throw Error(ErrorKind::kDepthExhausted, "ciphertext is at level 0; no rescale possible");
  }
  if (!std::isfinite(scalar)) throw Error(ErrorKind::kInput, "scalar must be finite");
  const uint64_t q_drop = ctx.primes()[ct.level];
  const double encoded = std::nearbyint(scalar * static_cast<double>(q_drop));
  if (!(std::abs(encoded) < 0x1.0p62)) {
    throw Error(ErrorKind::kCapacity, "scalar too large for the modulus being dropped");
  }
  const auto k = static_cast<int64_t>(encoded);
  Ciphertext out = ct;
  for (auto& c : out.c) {
    for (size_t i = 0; i < c.prime_count(); ++i) {
      const uint64_t q = ctx.primes()[i];
      const uint64_t w = reduce_signed(k, q);
      const uint64_t ws = shoup_precompute(w, q);
      for (auto& x : c.residues(i)) x = mul_mod_shoup(x, w, ws, q);
    }
    ctx.divide_round_by_last(c);
  }
  out.level = ct.level - 1;
  return out;
}

std::vector<uint8_t> serialize_ct(const CkksContext& ctx, const Ciphertext& ct) {
  int exp = 0;
  const double mantissa = std::frexp(ct.scale, &exp);
  if (mantissa != 0.5 || exp - 1 < 0 || exp - 1 > 0xffff) {
    throw Error(ErrorKind::kState, "ciphertext scale is not a representable power of two");
  }
  if (ct.level > ctx.top_level() || ct.level > 0xff) {
    throw Error(ErrorKind::kState, "ciphertext level out of range");
  }
  const size_t primes = ct.level + 1;
  std::vector<uint8_t> out;
  out.reserve(kCiphertextHeaderBytes + 2 * primes * ctx.degree() * 8);
  write_le(out, ctx.params_hash(), 8);
  write_le(out, ct.level, 1);
  write_le(out, static_cast<uint64_t>(exp - 1), 2);
  write_le(out, ct.slot_fill, 4);
  for (const auto& c : ct.c) {
    if (c.prime_count() != primes || c.degree() != ctx.degree()) {
      throw Error(ErrorKind::kState, "ciphertext component shape does not match its level");
    }
    for (size_t i = 0; i < primes; ++i) {
      for (uint64_t x : c.residues(i)) write_le(out, x, 8);
    }
  }
  return out;
}

Ciphertext deserialize_ct(const CkksContext& ctx, std::span<const uint8_t> bytes) {
  if (bytes.size() < kCiphertextHeaderBytes) {
    throw Error(ErrorKind::kDecode, "ciphertext buffer shorter than its header");
  }
  if (read_le(bytes, 0, 8) != ctx.params_hash()) {
    throw Error(ErrorKind::kDecode, "ciphertext was produced under different parameters");
  }
  Ciphertext ct;
  ct.level = read_le(bytes, 8, 1);
  const auto scale_log2 = static_cast<int>(read_le(bytes, 9, 2));
  ct.slot_fill = static_cast<uint32_t>(read_le(bytes, 11, 4));
  if (ct.level > ctx.top_level()) throw Error(ErrorKind::kDecode, "ciphertext level out of range");
  if (scale_log2 > 1023) throw Error(ErrorKind::kDecode, "ciphertext scale out of range");
  if (ct.slot_fill > ctx.slot_count()) throw Error(ErrorKind::kDecode, "slot fill exceeds slot count");
  ct.scale = std::ldexp(1.0, scale_log2);

  const size_t primes = ct.level + 1;
  const size_t n = ctx.degree();
  if (bytes.size() != kCiphertextHeaderBytes + 2 * primes * n * 8) {
    throw Error(ErrorKind::kDecode, "ciphertext buffer has the wrong length for its level");
  }
  size_t offset = kCiphertextHeaderBytes;
  for (auto& c : ct.c) {
    c = RnsPoly(n, primes);
    for (size_t i = 0; i < primes; ++i) {
      const uint64_t q = ctx.primes()[i];
      for (auto& x : c.residues(i)) {
        x = read_le(bytes, offset, 8);
        offset += 8;
        if (x >= q) throw Error(ErrorKind::kDecode, "ciphertext residue not reduced");
      }
    }
  }
  return ct;
}

}  // namespace privfed::ckks
