#pragma once

#include <optional>
#include <vector>

#include "apsieve/cases.hpp"

namespace apsieve {

inline constexpr u64 kDefaultKMax = 600;

// 2p-th powers of F_q, q = 2kp + 1: {0} and the k-th roots of unity. Sorted.
std::vector<u64> mu_set(u64 p, u64 q);
// p-th powers of F_q: {0} and the 2k-th roots of unity. Sorted.
std::vector<u64> chi_set(u64 p, u64 q);

// True iff no zeta in mu(p, q) has ((b zeta + c) / a)^(2k) in {0, 1}.
bool b_set_is_empty(u64 a, u64 b, u64 c, u64 p, u64 q);
bool b_set_is_empty(const mpz_class& a, const mpz_class& b, const mpz_class& c, u64 p, u64 q);

struct GermainContext {
    u64 p = 0;
    u64 q = 0;
    u64 k = 0;
    std::vector<u64> mu;
    u64 a_mod = 0;
    u64 b_mod = 0;
};

// Auxiliary-prime sieve for a * w2^p - b * w1^(2p) = c at a fixed exponent.
// Tables are built lazily; an instance must not be shared between threads.
class GermainSieve {
public:
    GermainSieve(const FactoredInteger& a, const FactoredInteger& b, u64 p, u64 k_max);

    u64 p() const { return p_; }
    u64 k_max() const { return k_max_; }
    const std::vector<GermainContext>& contexts() const { return ctx_; }

    // Smallest eliminating q for c, or none.
    std::optional<u64> eliminating_prime(const mpz_class& c);
    // Same for c = c0 * r^2 without big integers.
    std::optional<u64> eliminating_prime(u64 c0, u64 r);

private:
    struct Lazy {
        std::vector<u64> chi;
        std::vector<bool> reachable;  // c with nonempty B(p, q)
        u64 queries = 0;
    };
    bool eliminates(size_t i, u64 cmod);

    u64 p_;
    u64 k_max_;
    std::vector<GermainContext> ctx_;
    std::vector<Lazy> lazy_;
};

std::optional<u64> find_eliminating_prime(const TernaryInstance& inst, u64 k_max);

struct SieveResult {
    std::vector<u64> survivors;
    std::vector<std::pair<u64, u64>> eliminated;  // (r, q)
    std::vector<std::pair<u64, u64>> coprime;     // (r, prime forced not to divide r)
};

SieveResult sieve_range(int case_id, u64 p, u64 r_lo, u64 r_hi, u64 k_max);
SieveResult sieve_range(GermainSieve& sieve, const CaseTemplate& t, u64 r_lo, u64 r_hi);

}  // namespace apsieve
