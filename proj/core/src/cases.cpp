#include "apsieve/cases.hpp"

#include <stdexcept>

namespace apsieve {

namespace {

using T = FactoredInteger::Term;

CaseTemplate make_case(int id, bool seven, int v2, bool three, FactoredInteger xc, FactoredInteger rc,
                       FactoredInteger a, FactoredInteger b, u64 c0, u64 k, Branch br, const char* cond)
{
    CaseTemplate t;
    t.id = id;
    t.seven_divides_x = seven;
    t.x_v2 = v2;
    t.three_divides_x = three;
    t.x_conditions = cond;
    t.x_coef = std::move(xc);
    t.rhs_coef = std::move(rc);
    t.a = std::move(a);
    t.b = std::move(b);
    t.c0 = c0;
    t.y_factor = k;
    t.branch = br;
    return t;
}

std::vector<CaseTemplate> build()
{
    const FactoredInteger one;
    const FactoredInteger s7{{T{7, -1, 1}}};  // 7^(p-1)
    std::vector<CaseTemplate> v;
    v.push_back(make_case(1, false, 0, false, one, s7, s7, one, 12, 1, Branch::sieve, "7 !| x, 12 !| x"));
    v.push_back(make_case(2, false, 0, true, FactoredInteger{{T{3, -1, 1}}}, FactoredInteger{{T{3, 1, 0}, T{7, -1, 1}}},
                          s7, FactoredInteger{{T{3, -3, 2}}}, 4, 3, Branch::sieve, "7 !| x, 2 !| x, 3 | x"));
    v.push_back(make_case(3, false, 2, false, FactoredInteger{{T{2, -2, 1}}}, FactoredInteger{{T{2, 2, 0}, T{7, -1, 1}}},
                          s7, FactoredInteger{{T{2, -6, 2}}}, 3, 2, Branch::sieve, "7 !| x, 4 | x, 3 !| x"));
    v.push_back(make_case(4, false, 2, true, FactoredInteger{{T{2, -2, 1}, T{3, -1, 1}}},
                          FactoredInteger{{T{2, 2, 0}, T{3, 1, 0}, T{7, -1, 1}}}, s7,
                          FactoredInteger{{T{2, -6, 2}, T{3, -3, 2}}}, 1, 6, Branch::sieve, "7 !| x, 12 | x"));
    v.push_back(make_case(5, false, 1, false, FactoredInteger{{T{2, -1, 1}}}, FactoredInteger{{T{2, 1, 0}, T{7, -1, 1}}},
                          s7, FactoredInteger{{T{2, -3, 2}}}, 6, 2, Branch::even_contradiction,
                          "7 !| x, 2 | x, 3 !| x, 4 !| x"));
    v.push_back(make_case(6, false, 1, true, FactoredInteger{{T{2, -1, 1}, T{3, -1, 1}}},
                          FactoredInteger{{T{2, 1, 0}, T{3, 1, 0}, T{7, -1, 1}}}, s7,
                          FactoredInteger{{T{2, -3, 2}, T{3, -3, 2}}}, 2, 6, Branch::even_contradiction,
                          "7 !| x, 6 | x, 4 !| x"));
    const T t7{7, -2, 2};  // 7^(2p-2) in b for the 7 | x cases
    v.push_back(make_case(7, true, 0, false, s7, one, one, FactoredInteger{{t7}}, 12, 1, Branch::lehmer,
                          "7 | x, 12 !| x"));
    v.push_back(make_case(8, true, 0, true, FactoredInteger{{T{3, -1, 1}, T{7, -1, 1}}}, FactoredInteger{{T{3, 1, 0}}},
                          one, FactoredInteger{{T{3, -3, 2}, t7}}, 4, 3, Branch::lehmer, "7 | x, 2 !| x, 3 | x"));
    v.push_back(make_case(9, true, 2, false, FactoredInteger{{T{2, -2, 1}, T{7, -1, 1}}}, FactoredInteger{{T{2, 2, 0}}},
                          one, FactoredInteger{{T{2, -6, 2}, t7}}, 3, 2, Branch::lehmer, "7 | x, 4 | x, 3 !| x"));
    v.push_back(make_case(10, true, 2, true, FactoredInteger{{T{2, -2, 1}, T{3, -1, 1}, T{7, -1, 1}}},
                          FactoredInteger{{T{2, 2, 0}, T{3, 1, 0}}}, one,
                          FactoredInteger{{T{2, -6, 2}, T{3, -3, 2}, t7}}, 1, 6, Branch::lehmer, "7 | x, 12 | x"));
    v.push_back(make_case(11, true, 1, false, FactoredInteger{{T{2, -1, 1}, T{7, -1, 1}}}, FactoredInteger{{T{2, 1, 0}}},
                          one, FactoredInteger{{T{2, -3, 2}, t7}}, 6, 2, Branch::even_contradiction,
                          "7 | x, 2 | x, 3 !| x, 4 !| x"));
    v.push_back(make_case(12, true, 1, true, FactoredInteger{{T{2, -1, 1}, T{3, -1, 1}, T{7, -1, 1}}},
                          FactoredInteger{{T{2, 1, 0}, T{3, 1, 0}}}, one,
                          FactoredInteger{{T{2, -3, 2}, T{3, -3, 2}, t7}}, 2, 6, Branch::even_contradiction,
                          "7 | x, 6 | x, 4 !| x"));
    return v;
}

}  // namespace

const char* branch_name(Branch b)
{
    switch (b) {
    case Branch::sieve: return "sieve";
    case Branch::even_contradiction: return "even-contradiction";
    case Branch::lehmer: return "lehmer";
    }
    return "?";
}

bool CaseTemplate::x_matches(const mpz_class& x) const
{
    if (x == 0) return false;
    const bool d7 = mpz_divisible_ui_p(x.get_mpz_t(), 7);
    const bool d3 = mpz_divisible_ui_p(x.get_mpz_t(), 3);
    const int v2 = mpz_divisible_ui_p(x.get_mpz_t(), 4) ? 2 : (mpz_divisible_ui_p(x.get_mpz_t(), 2) ? 1 : 0);
    return d7 == seven_divides_x && d3 == three_divides_x && v2 == x_v2;
}

std::vector<u64> CaseTemplate::coprimality_primes() const
{
    std::vector<u64> v;
    if (x_v2 > 0) v.push_back(2);
    if (three_divides_x) v.push_back(3);
    // 7 | r: for 7 | x it contradicts gcd(x, r) = 1; for 7 !| x, x^2 + 12r^2 is a 7-adic unit
    v.push_back(7);
    return v;
}

const std::vector<CaseTemplate>& build_case_templates()
{
    static const std::vector<CaseTemplate> table = build();
    return table;
}

const CaseTemplate& case_template(int id)
{
    if (id < 1 || id > 12) throw std::out_of_range("case id must be in 1..12");
    return build_case_templates()[static_cast<size_t>(id - 1)];
}

bool EvenCaseCertificate::verify(u64 p) const
{
    if (p < 5) return false;
    const i64 vb = b_term_alpha + b_term_beta * static_cast<i64>(p);
    // b-term sits strictly above the c-side, so the a-term would have to match v2_c_side
    if (vb <= v2_c_side) return false;
    // a-term valuation lies in a_term_v2 + p*Z_{>=0}
    const i64 need = v2_c_side - a_term_v2;
    return need < 0 || need % static_cast<i64>(p) != 0;
}

EvenCaseCertificate eliminate_even_case(const CaseTemplate& t)
{
    if (t.branch != Branch::even_contradiction)
        throw std::invalid_argument("eliminate_even_case: case " + std::to_string(t.id) + " is not an even case");
    EvenCaseCertificate c;
    c.case_id = t.id;
    c.v2_c_side = valuation(t.c0, 2);  // r is odd because 2 | x and gcd(x, r) = 1
    for (const auto& f : t.b.factors)
        if (f.prime == 2) c.b_term_alpha = f.alpha, c.b_term_beta = f.beta;
    c.a_term_v2 = 0;
    for (const auto& f : t.a.factors)
        if (f.prime == 2) c.a_term_v2 = static_cast<int>(f.alpha);
    c.statement = "v2(c0 r^2) = " + std::to_string(c.v2_c_side) + " with r odd; v2(b w1^2p) >= " +
                  std::to_string(c.b_term_alpha) + " + " + std::to_string(c.b_term_beta) +
                  "p; v2(a w2^p) in p*Z; no p >= 5 balances both sides";
    return c;
}

TernaryInstance instantiate(const CaseTemplate& t, u64 p, u64 r)
{
    if (t.branch != Branch::sieve) throw std::invalid_argument("instantiate: case is not a sieve case");
    if (p < 5 || !is_prime(p)) throw std::invalid_argument("instantiate: p must be a prime >= 5");
    if (r < 1 || r > kRMax) throw std::out_of_range("instantiate: r outside [1, 1e6]");
    TernaryInstance inst;
    inst.case_id = t.id;
    inst.p = p;
    inst.r = r;
    inst.a = t.a;
    inst.b = t.b;
    inst.c0 = t.c0;
    inst.c = mpz_class(static_cast<unsigned long>(t.c0)) * r * r;
    return inst;
}

mpz_class seven_cube_sum(const mpz_class& x, const mpz_class& r)
{
    mpz_class s = 0;
    for (int k = -3; k <= 3; ++k) {
        mpz_class t = x + k * r;
        s += t * t * t;
    }
    return s;
}

}  // namespace apsieve
