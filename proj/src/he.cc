#include "pefl/he.h"

#include <string>
#include <vector>

#include "gmp_util.h"
#include "pefl/error.h"

namespace pefl {
namespace {

using internal::fits_wide;
using internal::from_mpz;
using internal::to_mpz;

void check_key(const PublicKey& pk, const Ciphertext& c) {
  if (c.backend != pk.backend || c.key_id != pk.key_id) {
    throw Error(ErrorCode::kKeyMismatch,
                "ciphertext was produced under a different key");
  }
}

Wide checked_transparent(Wide v) {
  if (wide_abs(v) >= kTransparentBound) {
    throw Error(ErrorCode::kPlaintextRange,
                "plaintext " + wide_to_string(v) + " exceeds transparent bound");
  }
  return v;
}

Wide transparent_add(Wide a, Wide b) {
  Wide out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(ErrorCode::kPlaintextRange, "transparent addition overflows");
  }
  return checked_transparent(out);
}

Wide transparent_mul(Wide a, Wide b) {
  Wide out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(ErrorCode::kPlaintextRange,
                "transparent multiplication overflows");
  }
  return checked_transparent(out);
}

// k mod N in [0, N).
mpz_class reduce(const mpz_class& k, const mpz_class& n) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), k.get_mpz_t(), n.get_mpz_t());
  return r;
}

mpz_class random_below(const mpz_class& bound, int bits, Rng& rng) {
  std::vector<std::uint64_t> words(static_cast<std::size_t>(bits / 64 + 2));
  for (auto& w : words) w = rng();
  mpz_class out;
  mpz_import(out.get_mpz_t(), words.size(), -1, sizeof(std::uint64_t), 0, 0,
             words.data());
  return reduce(out, bound);
}

mpz_class random_prime(gmp_randclass& gen, int bits) {
  mpz_class p = gen.get_z_bits(bits);
  // Top two bits set so the product of two such primes has exactly 2*bits
  // bits.
  mpz_setbit(p.get_mpz_t(), static_cast<mp_bitcnt_t>(bits - 1));
  mpz_setbit(p.get_mpz_t(), static_cast<mp_bitcnt_t>(bits - 2));
  mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
  return p;
}

const mpz_class& paillier_payload(const Ciphertext& c) {
  return std::get<mpz_class>(c.payload);
}

Ciphertext with_payload(const PublicKey& pk, mpz_class value) {
  return Ciphertext{pk.backend, pk.key_id, std::move(value)};
}

}  // namespace

std::string_view backend_name(Backend backend) {
  return backend == Backend::kPaillier ? "paillier" : "transparent";
}

Backend parse_backend(std::string_view name) {
  if (name == "transparent") return Backend::kTransparent;
  if (name == "paillier") return Backend::kPaillier;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown backend '" + std::string(name) + "'");
}

KeyPair keygen(Backend backend, int key_bits, std::uint64_t seed) {
  KeyPair kp;
  if (backend == Backend::kTransparent) {
    kp.key_bits = 0;
    kp.public_key.backend = kp.secret_key.backend = backend;
    kp.public_key.key_id = kp.secret_key.key_id = derive_seed(seed, 0x7470);
    return kp;
  }
  if (key_bits < 512 || key_bits % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "paillier key_bits must be even and >= 512, got " +
                    std::to_string(key_bits));
  }
  gmp_randclass gen(gmp_randinit_mt);
  gen.seed(static_cast<unsigned long>(derive_seed(seed, 0x706b)));
  const int half = key_bits / 2;
  mpz_class p = random_prime(gen, half);
  mpz_class q = random_prime(gen, half);
  while (p == q) q = random_prime(gen, half);

  const mpz_class n = p * q;
  mpz_class lambda;
  const mpz_class pm1 = p - 1;
  const mpz_class qm1 = q - 1;
  mpz_lcm(lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
  // With g = N + 1, L(g^lambda mod N^2) = lambda mod N.
  mpz_class mu;
  if (mpz_invert(mu.get_mpz_t(), lambda.get_mpz_t(), n.get_mpz_t()) == 0) {
    throw Error(ErrorCode::kInvalidArgument, "lambda not invertible mod N");
  }

  kp.key_bits = key_bits;
  PublicKey& pk = kp.public_key;
  pk.backend = backend;
  pk.key_bits = key_bits;
  pk.n = n;
  pk.n_squared = n * n;
  pk.key_id = derive_seed(mpz_get_ui(n.get_mpz_t()), 0x706b);

  SecretKey& sk = kp.secret_key;
  sk.backend = backend;
  sk.key_id = pk.key_id;
  sk.n = pk.n;
  sk.n_squared = pk.n_squared;
  sk.lambda = lambda;
  sk.mu = mu;
  return kp;
}

mpz_class plaintext_half_range(const PublicKey& pk) {
  if (pk.backend == Backend::kTransparent) return to_mpz(kTransparentBound);
  return pk.n / 2;
}

Ciphertext encrypt(const PublicKey& pk, Wide m, Rng& rng) {
  if (pk.backend == Backend::kTransparent) {
    return Ciphertext{pk.backend, pk.key_id, checked_transparent(m)};
  }
  const mpz_class mz = to_mpz(m);
  if (abs(mz) >= plaintext_half_range(pk)) {
    throw Error(ErrorCode::kPlaintextRange,
                "plaintext " + wide_to_string(m) + " exceeds N/2");
  }
  mpz_class r;
  do {
    r = random_below(pk.n, pk.key_bits, rng);
  } while (r == 0 || gcd(r, pk.n) != 1);
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t(),
           pk.n_squared.get_mpz_t());
  // (1 + N)^m = 1 + mN mod N^2.
  mpz_class gm = reduce(mz, pk.n) * pk.n + 1;
  return with_payload(pk, reduce(gm * rn, pk.n_squared));
}

Wide decrypt(const SecretKey& sk, const Ciphertext& c) {
  if (c.backend != sk.backend || c.key_id != sk.key_id) {
    throw Error(ErrorCode::kKeyMismatch,
                "ciphertext was produced under a different key");
  }
  if (sk.backend == Backend::kTransparent) {
    return checked_transparent(std::get<Wide>(c.payload));
  }
  mpz_class u;
  mpz_powm(u.get_mpz_t(), paillier_payload(c).get_mpz_t(),
           sk.lambda.get_mpz_t(), sk.n_squared.get_mpz_t());
  mpz_class m = reduce(((u - 1) / sk.n) * sk.mu, sk.n);
  if (m > sk.n / 2) m -= sk.n;
  if (!fits_wide(m)) {
    throw Error(ErrorCode::kPlaintextRange,
                "decrypted value does not fit 126 bits");
  }
  return from_mpz(m);
}

Ciphertext add_ct(const PublicKey& pk, const Ciphertext& a,
                  const Ciphertext& b) {
  check_key(pk, a);
  check_key(pk, b);
  if (pk.backend == Backend::kTransparent) {
    return Ciphertext{pk.backend, pk.key_id,
                      transparent_add(std::get<Wide>(a.payload),
                                      std::get<Wide>(b.payload))};
  }
  return with_payload(pk, reduce(paillier_payload(a) * paillier_payload(b),
                                 pk.n_squared));
}

Ciphertext add_plain(const PublicKey& pk, const Ciphertext& c, Wide k) {
  check_key(pk, c);
  if (pk.backend == Backend::kTransparent) {
    return Ciphertext{pk.backend, pk.key_id,
                      transparent_add(std::get<Wide>(c.payload), k)};
  }
  const mpz_class gk = reduce(to_mpz(k), pk.n) * pk.n + 1;
  return with_payload(pk, reduce(paillier_payload(c) * gk, pk.n_squared));
}

Ciphertext mul_plain(const PublicKey& pk, const Ciphertext& c, Wide k) {
  check_key(pk, c);
  if (pk.backend == Backend::kTransparent) {
    return Ciphertext{pk.backend, pk.key_id,
                      transparent_mul(std::get<Wide>(c.payload), k)};
  }
  // c^k for k < 0 is (c^-1)^|k|; keeps the exponent short instead of N - |k|.
  mpz_class base = paillier_payload(c);
  if (k < 0 &&
      mpz_invert(base.get_mpz_t(), base.get_mpz_t(),
                 pk.n_squared.get_mpz_t()) == 0) {
    throw Error(ErrorCode::kInvalidArgument, "ciphertext not invertible");
  }
  const mpz_class e = reduce(to_mpz(wide_abs(k)), pk.n);
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(),
           pk.n_squared.get_mpz_t());
  return with_payload(pk, std::move(out));
}

}  // namespace pefl
