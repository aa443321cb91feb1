#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apsieve/cases.hpp"

namespace apsieve {

// Positive integer held as prime -> exponent; values can be far beyond 64 bits.
struct PrimeMap {
    std::map<u64, i64> e;

    static PrimeMap of(u64 n);
    static PrimeMap of(const FactoredInteger& f, u64 p);
    mpz_class value() const;
    u64 mod(u64 m) const;
    i64 v(u64 l) const;
    u64 unit_part_mod(u64 q, u64 m) const;  // value / q^v mod m
    bool divisible_by(u64 l) const { return v(l) > 0; }
    std::vector<u64> primes() const;
    PrimeMap& mul(u64 l, i64 k);
    bool operator==(const PrimeMap&) const = default;
};

PrimeMap operator*(const PrimeMap& x, const PrimeMap& y);

struct ReductionStep {
    char kind;  // 'g': l | A, C   'h': l | B, C   'd': common factor l^count
    u64 prime;
    i64 count;
    bool operator==(const ReductionStep&) const = default;
};

// A rho^p - B sigma^(2p) = C with A, B, C pairwise coprime.
struct CoprimeForm {
    PrimeMap A, B, C;
    std::vector<ReductionStep> reduction_trace;
};

struct Reduction {
    bool contradiction = false;  // some l divides A and B but not C
    u64 witness_prime = 0;
    CoprimeForm form;
};

Reduction reduce_coprime(const PrimeMap& a, const PrimeMap& b, const PrimeMap& c, u64 p);
Reduction reduce_coprime(u64 a, u64 b, u64 c, u64 p);
Reduction replay_trace(const PrimeMap& a, const PrimeMap& b, const PrimeMap& c, u64 p,
                       const std::vector<ReductionStep>& trace);

// -BC must be a square modulo every odd q | A; returns the failing q if any.
std::optional<u64> qr_obstruction(const CoprimeForm& f);
bool qr_necessary(const CoprimeForm& f);

enum class Solubility { insoluble, soluble, unknown };
const char* solubility_name(Solubility s);

struct LocalCertificate {
    Solubility status = Solubility::unknown;
    u64 q = 0;
    int e = 0;  // when insoluble: no solutions modulo q^e
};

// A X^n1 - B Y^n2 = C over Z_q, decided by valuation cases and unit power residues.
// Gives up (unknown) if a residue set larger than enum_cap would be needed.
LocalCertificate padic_soluble(const PrimeMap& A, const PrimeMap& B, const PrimeMap& C, u64 n1, u64 n2, u64 q,
                               u64 enum_cap = 20000000);

struct LocalOptions {
    // sigma appears as sigma^(sigma_degree * p); 2 is the exact form, 1 the Thue relaxation tau = sigma^2
    unsigned sigma_degree = 2;
    u64 enum_cap = 20000000;
};

LocalCertificate locally_soluble(const CoprimeForm& f, u64 p, u64 q, const LocalOptions& opt = {});

struct LocalTestOptions {
    unsigned sigma_degree = 1;
    u64 small_prime_bound = 19;
    bool include_p = true;
    u64 enum_cap = 20000000;
};

struct LocalOutcome {
    bool eliminated = false;
    std::string reason;  // "reduction", "quadratic-residue", "local"
    u64 q = 0;
    int e = 0;
    std::vector<u64> tested;
};

LocalOutcome local_test(const PrimeMap& a, const PrimeMap& b, const PrimeMap& c, u64 p,
                        const LocalTestOptions& opt = {});
LocalOutcome local_test(const TernaryInstance& inst, const LocalTestOptions& opt = {});

}  // namespace apsieve
