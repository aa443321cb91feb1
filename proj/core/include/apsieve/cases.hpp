#pragma once

#include <string>
#include <vector>

#include "apsieve/arith.hpp"

namespace apsieve {

inline constexpr u64 kRMax = 1000000;

enum class Branch { sieve, even_contradiction, lehmer };
const char* branch_name(Branch b);

// Descent case for 7x(x^2 + 12r^2) = y^p:
//   x = x_coef * w1^p,  x^2 + 12 r^2 = rhs_coef * w2^p,
//   a * w2^p - b * w1^(2p) = c0 * r^2,  y = 7 * y_factor * w1 * w2.
struct CaseTemplate {
    int id = 0;
    bool seven_divides_x = false;
    int x_v2 = 0;  // 0: x odd, 1: 2 || x, 2: 4 | x
    bool three_divides_x = false;
    std::string x_conditions;
    FactoredInteger x_coef;
    FactoredInteger rhs_coef;
    FactoredInteger a;
    FactoredInteger b;
    u64 c0 = 1;
    u64 y_factor = 1;
    Branch branch = Branch::sieve;

    bool x_matches(const mpz_class& x) const;
    // primes that cannot divide r once gcd(x, r) = 1
    std::vector<u64> coprimality_primes() const;
};

const std::vector<CaseTemplate>& build_case_templates();
const CaseTemplate& case_template(int id);

// 2-adic obstruction for the even cases.
struct EvenCaseCertificate {
    int case_id = 0;
    int v2_c_side = 0;          // v2(c0 * r^2) with r odd
    i64 b_term_alpha = 0;       // v2(b) = b_term_alpha + b_term_beta * p
    i64 b_term_beta = 0;
    int a_term_v2 = 0;          // v2(a); a-term valuation is a_term_v2 + p * v2(w2)
    std::string statement;

    // True when the valuation pattern is unsatisfiable at exponent p.
    bool verify(u64 p) const;
};

EvenCaseCertificate eliminate_even_case(const CaseTemplate& t);

struct TernaryInstance {
    int case_id = 0;
    u64 p = 0;
    u64 r = 0;
    FactoredInteger a;
    FactoredInteger b;
    u64 c0 = 0;
    mpz_class c;  // c0 * r^2

    mpz_class a_value() const { return a.eval(p); }
    mpz_class b_value() const { return b.eval(p); }
};

TernaryInstance instantiate(const CaseTemplate& t, u64 p, u64 r);

// Sum of the seven cubes (x - 3r)^3 + ... + (x + 3r)^3.
mpz_class seven_cube_sum(const mpz_class& x, const mpz_class& r);

}  // namespace apsieve
