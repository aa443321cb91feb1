#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace apsieve {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// Largest input accepted by factor().
inline constexpr u64 kFactorLimit = 100000000000000ULL;  // 1e14

struct PrimePower {
    u64 prime;
    int exp;
    bool operator==(const PrimePower&) const = default;
};

struct Factorization {
    u64 n = 1;
    std::vector<PrimePower> factors;  // primes strictly increasing
};

// Coefficient whose value at exponent p is prod prime^(alpha + beta*p).
struct FactoredInteger {
    struct Term {
        u64 prime;
        i64 alpha;
        i64 beta;
        bool operator==(const Term&) const = default;
    };
    std::vector<Term> factors;

    FactoredInteger() = default;
    explicit FactoredInteger(std::vector<Term> terms);

    i64 exponent_at(u64 prime, u64 p) const;
    mpz_class eval(u64 p) const;
    bool valid_at(u64 p) const;
    std::string to_string() const;
    bool operator==(const FactoredInteger&) const = default;
};

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }
u64 powmod(u64 base, u64 e, u64 m);
u64 invmod(u64 a, u64 m);  // throws when not invertible
u64 gcd(u64 a, u64 b);
inline u64 mod_signed(i64 a, u64 m)
{
    i64 r = a % static_cast<i64>(m);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

bool is_prime(u64 n);
u64 next_prime(u64 n);  // smallest prime > n
std::vector<u64> primes_up_to(u64 n);

Factorization factor(u64 n);
std::pair<u64, u64> squarefree_decompose(u64 n);
u64 radical(u64 n);

int jacobi(i64 a, u64 n);
int jacobi(const mpz_class& a, u64 n);
std::optional<u64> sqrt_mod(i64 a, u64 q);

u64 eval_mod(const FactoredInteger& f, u64 p, u64 q);

// Integer n-th root test: returns r with r^n == x when it exists (sign respected for odd n).
std::optional<mpz_class> exact_root(const mpz_class& x, unsigned long n);
bool is_square(const mpz_class& x);

int valuation(u64 n, u64 q);
int valuation(const mpz_class& n, u64 q);
u64 primitive_root(u64 q);

}  // namespace apsieve
