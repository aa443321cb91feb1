#pragma once

#include <string>
#include <vector>

#include "apsieve/cases.hpp"

namespace apsieve {

// C1 x^2 + C2 = y^p with C1 C2 = c d^2, c squarefree.
struct LehmerInstance {
    u64 C1 = 1;
    u64 C2 = 1;
    u64 c = 1;
    u64 d = 1;
};

// Throws std::invalid_argument unless C1 is squarefree, gcd(C1, C2) = 1 and C1 C2 is not 7 mod 8.
LehmerInstance make_lehmer_instance(u64 C1, u64 C2);

// Primes p >= 5 allowed by the primitive divisor theorem, ascending.
std::vector<u64> candidate_exponents(u64 C1, u64 C2);

struct GbPolynomial {
    i64 b = 1;
    std::vector<mpz_class> coefficients;  // coefficients[i] multiplies X^i
};

// ((X + b s)^p - (X - b s)^p) / (2 b s) - d C1^((p-1)/2) / b with s^2 = -3.
GbPolynomial gb_polynomial(i64 b, u64 d, u64 C1, u64 p);

mpz_class poly_eval(const std::vector<mpz_class>& poly, const mpz_class& x);

// All integer roots, ascending. Throws on the zero polynomial.
std::vector<mpz_class> integer_roots(const std::vector<mpz_class>& poly);

struct LehmerSolution {
    mpz_class x, y;
    mpz_class a;  // gamma = a + b sqrt(-3)
    i64 b = 0;
    bool operator==(const LehmerSolution&) const = default;
};

// Solutions with x, y > 0 and gcd(C1 x^2, C2, y) = 1, sorted by x. Requires c = 3.
std::vector<LehmerSolution> solve_C1x2_plus_C2(u64 C1, u64 C2, u64 p);

// One (X, w2) found by the solver and what became of it.
struct LehmerCandidate {
    u64 p = 0;
    mpz_class X, x, w2;
    bool accepted = false;
    std::string note;
};

// x, y with 7 x (x^2 + 12 r^2) = y^p.
struct CubeSumSolution {
    mpz_class x, y;
    u64 p = 0;
};

struct CaseResolution {
    int case_id = 0;
    u64 r = 0;
    LehmerInstance instance;
    u64 x_multiplier = 1;  // x = x_multiplier * X
    std::vector<u64> exponents;
    std::vector<LehmerCandidate> candidates;
    std::vector<CubeSumSolution> solutions;
};

// Cases 7, 8, 9, 10; throws std::invalid_argument otherwise.
CaseResolution resolve_case(int case_id, u64 r);
// Only the listed exponents (each must be a candidate for the case to be exhaustive).
CaseResolution resolve_case(int case_id, u64 r, const std::vector<u64>& exponents);

}  // namespace apsieve
