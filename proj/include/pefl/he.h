#ifndef PEFL_HE_H_
#define PEFL_HE_H_

#include <gmpxx.h>

#include <cstdint>
#include <string_view>
#include <variant>

#include "pefl/rng.h"
#include "pefl/wide_int.h"

namespace pefl {

// Additively homomorphic encryption with two interchangeable backends.
//
// kTransparent carries the plaintext inside the ciphertext and only guards
// its range; it exists so protocol tests run fast and fail legibly.
// kPaillier is textbook Paillier with g = N + 1 over GMP integers. Signed
// plaintexts use the centered lift: residues above N/2 decode as x - N.
enum class Backend { kTransparent, kPaillier };

std::string_view backend_name(Backend backend);
// Accepts "transparent" or "paillier"; throws kInvalidArgument otherwise.
Backend parse_backend(std::string_view name);

inline constexpr int kDefaultKeyBits = 512;

// |m| must stay below this for the transparent backend.
inline constexpr Wide kTransparentBound = wide_pow2(126);

struct PublicKey {
  Backend backend = Backend::kTransparent;
  std::uint64_t key_id = 0;
  int key_bits = 0;
  mpz_class n;          // Paillier modulus
  mpz_class n_squared;
};

struct SecretKey {
  Backend backend = Backend::kTransparent;
  std::uint64_t key_id = 0;
  mpz_class n;
  mpz_class n_squared;
  mpz_class lambda;     // lcm(p - 1, q - 1)
  mpz_class mu;         // lambda^-1 mod N
};

struct KeyPair {
  PublicKey public_key;
  SecretKey secret_key;
  int key_bits = 0;
};

struct Ciphertext {
  Backend backend = Backend::kTransparent;
  std::uint64_t key_id = 0;
  std::variant<Wide, mpz_class> payload;
};

// Deterministic in `seed`. key_bits is ignored by the transparent backend and
// must be >= 512 for Paillier.
KeyPair keygen(Backend backend, int key_bits, std::uint64_t seed);

Ciphertext encrypt(const PublicKey& pk, Wide m, Rng& rng);
Wide decrypt(const SecretKey& sk, const Ciphertext& c);

Ciphertext add_ct(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext add_plain(const PublicKey& pk, const Ciphertext& c, Wide k);
Ciphertext mul_plain(const PublicKey& pk, const Ciphertext& c, Wide k);

// Largest |m| (exclusive) the key can encrypt and decrypt faithfully.
mpz_class plaintext_half_range(const PublicKey& pk);

}  // namespace pefl

#endif  // PEFL_HE_H_
