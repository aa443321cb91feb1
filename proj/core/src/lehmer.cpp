#include "apsieve/lehmer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "apsieve/quadfield.hpp"

namespace apsieve {

namespace {

constexpr size_t kScreenCap = 50000000;

std::vector<u64> prime_factors_at_least(u64 n, u64 lo)
{
    std::vector<u64> out;
    if (n == 0) return out;
    for (const auto& f : factor(n).factors)
        if (f.prime >= lo) out.push_back(f.prime);
    return out;
}

u64 mod_mpz(const mpz_class& x, u64 m)
{
    return mpz_fdiv_ui(x.get_mpz_t(), m);
}

// Integers a in [-R, R] with eval(a mod l, l) == 0 for a growing set of screen primes l.
template <class Eval>
std::vector<mpz_class> screen_roots(const mpz_class& R, Eval&& eval)
{
    const mpz_class span = 2 * R + 1;
    mpz_class M = 1;
    std::vector<mpz_class> res{0};
    u64 ell = 2;
    while (M < span) {
        ell = next_prime(ell);
        std::vector<u64> roots;
        for (u64 t = 0; t < ell; ++t)
            if (eval(t, ell) == 0) roots.push_back(t);
        if (roots.empty()) return {};
        if (2 * roots.size() > ell && roots.size() > 1) continue;
        u64 inv = invmod(mod_mpz(M, ell), ell);
        std::vector<mpz_class> next;
        next.reserve(res.size() * roots.size());
        for (const auto& r0 : res) {
            u64 rm = mod_mpz(r0, ell);
            for (u64 t : roots) {
                u64 k = mulmod((t + ell - rm) % ell, inv, ell);
                next.push_back(r0 + M * k);
            }
        }
        if (next.size() > kScreenCap) throw std::runtime_error("integer root screen exceeded its candidate cap");
        M *= ell;
        res = std::move(next);
    }
    std::vector<mpz_class> out;
    for (auto& r0 : res) {
        mpz_class a = r0 > R ? mpz_class(r0 - M) : r0;
        if (abs(a) <= R) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

mpz_class ceil_root(const mpz_class& x, unsigned long k)
{
    mpz_class r;
    mpz_root(r.get_mpz_t(), x.get_mpz_t(), k);
    return r + 1;
}

// (x + y s)^e with s^2 = -3.
std::pair<mpz_class, mpz_class> pow_sqrt_m3(const mpz_class& x, const mpz_class& y, u64 e)
{
    mpz_class rx = 1, ry = 0, bx = x, by = y;
    while (e) {
        if (e & 1) {
            mpz_class t = rx * bx - 3 * ry * by;
            ry = rx * by + ry * bx;
            rx = t;
        }
        e >>= 1;
        if (e) {
            mpz_class t = bx * bx - 3 * by * by;
            by = 2 * bx * by;
            bx = t;
        }
    }
    return {rx, ry};
}

// U_n for P = 2a, Q = a^2 + 3b^2 modulo l.
u64 lucas_u_mod(u64 P, u64 Q, u64 n, u64 ell)
{
    // [U_{k+1}, U_k] advanced by the companion matrix
    u64 m00 = P % ell, m01 = (ell - Q % ell) % ell, m10 = 1, m11 = 0;
    u64 r00 = 1, r01 = 0, r10 = 0, r11 = 1;
    u64 e = n;
    while (e) {
        if (e & 1) {
            u64 a = (mulmod(r00, m00, ell) + mulmod(r01, m10, ell)) % ell;
            u64 b = (mulmod(r00, m01, ell) + mulmod(r01, m11, ell)) % ell;
            u64 c = (mulmod(r10, m00, ell) + mulmod(r11, m10, ell)) % ell;
            u64 d = (mulmod(r10, m01, ell) + mulmod(r11, m11, ell)) % ell;
            r00 = a, r01 = b, r10 = c, r11 = d;
        }
        e >>= 1;
        if (e) {
            u64 a = (mulmod(m00, m00, ell) + mulmod(m01, m10, ell)) % ell;
            u64 b = (mulmod(m00, m01, ell) + mulmod(m01, m11, ell)) % ell;
            u64 c = (mulmod(m10, m00, ell) + mulmod(m11, m10, ell)) % ell;
            u64 d = (mulmod(m10, m01, ell) + mulmod(m11, m11, ell)) % ell;
            m00 = a, m01 = b, m10 = c, m11 = d;
        }
    }
    return r10;  // M^n = [[U_{n+1}, -Q U_n], [U_n, -Q U_{n-1}]]
}

// Fujiwara bound for the roots of g_b, from the closed form of its coefficients.
mpz_class gb_root_bound(i64 b, u64 d, u64 C1, u64 p)
{
    const long double lp = std::log(static_cast<long double>(p));
    const long double l3b2 = std::log(3.0L * static_cast<long double>(b) * static_cast<long double>(b));
    const long double n = static_cast<long double>(p - 1);
    long double best = 0;
    // X^(p-j) has |coefficient| C(p, j) (3b^2)^((j-1)/2) for odd j; k = j - 1
    for (u64 j = 3; j < p; j += 2) {
        long double k = static_cast<long double>(j - 1);
        long double lc = std::lgamma(static_cast<long double>(p) + 1) - std::lgamma(static_cast<long double>(j) + 1) -
                         std::lgamma(static_cast<long double>(p - j) + 1);
        best = std::max(best, (lc - lp) / k + l3b2 / 2);
    }
    long double lk = std::log(static_cast<long double>(d) / std::fabs(static_cast<long double>(b))) +
                     n / 2 * std::log(static_cast<long double>(C1));
    long double l0 = std::max(n / 2 * l3b2, lk) + std::log(2.0L);
    best = std::max(best, (l0 - std::log(2.0L) - lp) / n);
    long double R = 2 * std::exp(best) * 1.001L + 2;
    mpz_class out;
    mpz_set_d(out.get_mpz_t(), static_cast<double>(std::ceil(R)));
    return out;
}

}  // namespace

LehmerInstance make_lehmer_instance(u64 C1, u64 C2)
{
    if (C1 == 0 || C2 == 0) throw std::invalid_argument("C1 and C2 must be positive");
    if (squarefree_decompose(C1).second != 1) throw std::invalid_argument("C1 must be squarefree");
    if (gcd(C1, C2) != 1) throw std::invalid_argument("gcd(C1, C2) must be 1");
    u128 prod = static_cast<u128>(C1) * C2;
    if (prod > kFactorLimit) throw std::invalid_argument("C1*C2 out of range");
    u64 n = static_cast<u64>(prod);
    if (n % 8 == 7) throw std::invalid_argument("C1*C2 = 7 mod 8: theorem does not apply");
    auto [c, d] = squarefree_decompose(n);
    return {C1, C2, c, d};
}

std::vector<u64> candidate_exponents(u64 C1, u64 C2)
{
    LehmerInstance L = make_lehmer_instance(C1, C2);
    std::set<u64> ps{5, 7, 11, 13};
    for (u64 q : prime_factors_at_least(class_number(L.c), 5)) ps.insert(q);
    for (const auto& f : factor(L.d).factors) {
        u64 q = f.prime;
        if ((2 * L.c) % q == 0) continue;
        int j = jacobi(-static_cast<i64>(L.c), q);
        for (u64 t : prime_factors_at_least(static_cast<u64>(static_cast<i64>(q) - j), 5)) ps.insert(t);
    }
    return {ps.begin(), ps.end()};
}

GbPolynomial gb_polynomial(i64 b, u64 d, u64 C1, u64 p)
{
    if (b == 0 || d % static_cast<u64>(b < 0 ? -b : b) != 0) throw std::invalid_argument("b must divide d");
    if (p < 3 || p % 2 == 0) throw std::invalid_argument("p must be odd");
    GbPolynomial g;
    g.b = b;
    g.coefficients.assign(p, 0);
    mpz_class binom = p;  // C(p, j)
    mpz_class bpow = 1;   // (-3 b^2)^((j-1)/2)
    const mpz_class step = -3 * mpz_class(b) * mpz_class(b);
    for (u64 j = 1; j <= p; j += 2) {
        g.coefficients[p - j] = binom * bpow;
        if (j + 2 <= p) {
            binom = binom * (p - j) * (p - j - 1) / ((j + 1) * (j + 2));
            bpow *= step;
        }
    }
    mpz_class c1pow;
    mpz_ui_pow_ui(c1pow.get_mpz_t(), C1, (p - 1) / 2);
    g.coefficients[0] -= mpz_class(static_cast<long>(static_cast<i64>(d) / b)) * c1pow;
    return g;
}

mpz_class poly_eval(const std::vector<mpz_class>& poly, const mpz_class& x)
{
    mpz_class acc = 0;
    for (size_t i = poly.size(); i-- > 0;) acc = acc * x + poly[i];
    return acc;
}

std::vector<mpz_class> integer_roots(const std::vector<mpz_class>& poly_in)
{
    std::vector<mpz_class> f = poly_in;
    while (!f.empty() && f.back() == 0) f.pop_back();
    if (f.empty()) throw std::invalid_argument("zero polynomial");

    std::vector<mpz_class> roots;
    size_t lead_zeros = 0;
    while (f[lead_zeros] == 0) ++lead_zeros;
    if (lead_zeros) {
        roots.push_back(0);
        f.erase(f.begin(), f.begin() + static_cast<long>(lead_zeros));
    }
    if (f.size() == 1) return roots;

    mpz_class content = 0;
    for (const auto& c : f) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_mpz_t());
    for (auto& c : f) c /= content;

    const size_t n = f.size() - 1;
    const mpz_class lead = abs(f[n]);
    mpz_class best = 0;
    for (size_t k = 1; k <= n; ++k) {
        mpz_class num = abs(f[n - k]);
        if (num == 0) continue;
        mpz_class den = k == n ? mpz_class(2 * lead) : lead;
        mpz_class q = (num + den - 1) / den;
        best = std::max(best, ceil_root(q, k));
    }
    mpz_class R = 2 * best + 1;

    std::vector<u64> red;
    u64 red_mod = 0;
    auto eval = [&](u64 t, u64 ell) {
        if (red_mod != ell) {
            red.resize(f.size());
            for (size_t i = 0; i < f.size(); ++i) red[i] = mod_mpz(f[i], ell);
            red_mod = ell;
        }
        u64 acc = 0;
        for (size_t i = red.size(); i-- > 0;) acc = (mulmod(acc, t, ell) + red[i]) % ell;
        return acc;
    };
    for (auto& a : screen_roots(R, eval)) {
        if (a == 0) continue;
        if (f[0] % a != 0) continue;
        if (poly_eval(f, a) == 0) roots.push_back(a);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<LehmerSolution> solve_C1x2_plus_C2(u64 C1, u64 C2, u64 p)
{
    LehmerInstance L = make_lehmer_instance(C1, C2);
    if (L.c != 3) throw std::invalid_argument("solver is specialized to c = 3");
    if (p < 5 || !is_prime(p)) throw std::invalid_argument("p must be a prime >= 5");

    mpz_class c1half;
    mpz_ui_pow_ui(c1half.get_mpz_t(), C1, (p - 1) / 2);
    const mpz_class target_im = c1half * L.d;
    const mpz_class c1re = c1half * C1;

    std::vector<i64> bs;
    for (u64 b = 1; b * b <= L.d; ++b) {
        if (L.d % b) continue;
        bs.push_back(static_cast<i64>(b));
        if (b * b != L.d) bs.push_back(static_cast<i64>(L.d / b));
    }
    std::sort(bs.begin(), bs.end());
    const size_t npos = bs.size();
    for (size_t i = 0; i < npos; ++i) bs.push_back(-bs[i]);

    std::vector<LehmerSolution> out;
    for (i64 b : bs) {
        const u64 bb = static_cast<u64>(b < 0 ? -b : b);
        const mpz_class R = gb_root_bound(b, L.d, C1, p);
        const i64 dq = static_cast<i64>(L.d) / b;
        auto eval = [&](u64 t, u64 ell) {
            u64 P = mulmod(2, t, ell);
            u64 Q = (mulmod(t, t, ell) + mulmod(3 % ell, mulmod(bb % ell, bb % ell, ell), ell)) % ell;
            u64 U = lucas_u_mod(P, Q, p, ell);
            u64 K = mulmod(mod_signed(dq, ell), powmod(C1 % ell, (p - 1) / 2, ell), ell);
            return (U + ell - K) % ell;
        };
        for (auto& a : screen_roots(R, eval)) {
            auto [re, im] = pow_sqrt_m3(a, b, p);
            if (im != target_im) continue;
            if (re % c1re != 0) continue;
            mpz_class X = abs(mpz_class(re / c1re));
            mpz_class ynum = a * a + 3 * mpz_class(b) * mpz_class(b);
            if (ynum % C1 != 0) continue;
            mpz_class y = ynum / C1;
            if (X == 0 || y <= 0) continue;
            mpz_class yp;
            mpz_pow_ui(yp.get_mpz_t(), y.get_mpz_t(), p);
            if (C1 * X * X + C2 != yp) continue;
            mpz_class g = gcd(mpz_class(C1 * X * X), mpz_class(C2));
            g = gcd(g, y);
            if (g != 1) continue;
            out.push_back({X, y, a, b});
        }
    }
    std::sort(out.begin(), out.end(), [](const LehmerSolution& u, const LehmerSolution& v) {
        return u.x != v.x ? u.x < v.x : (u.a != v.a ? u.a < v.a : u.b < v.b);
    });
    // gamma and -conj(gamma) give the same (x, y)
    out.erase(std::unique(out.begin(), out.end(),
                          [](const LehmerSolution& u, const LehmerSolution& v) { return u.x == v.x && u.y == v.y; }),
              out.end());
    return out;
}

namespace {

struct LehmerShape {
    u64 C1;
    u64 C2_scale;  // C2 = C2_scale * r^2
    u64 multiplier;
};

LehmerShape shape_for(int case_id)
{
    switch (case_id) {
    case 7: return {1, 12, 1};
    case 8: return {3, 4, 3};
    case 9: return {1, 3, 2};
    case 10: return {3, 1, 6};
    default: throw std::invalid_argument("lehmer branch covers cases 7 to 10 only");
    }
}

}  // namespace

CaseResolution resolve_case(int case_id, u64 r)
{
    LehmerShape s = shape_for(case_id);
    if (r == 0 || r > kRMax) throw std::invalid_argument("r out of range");
    CaseResolution res;
    res.case_id = case_id;
    res.r = r;
    res.x_multiplier = s.multiplier;
    for (u64 q : case_template(case_id).coprimality_primes())
        if (r % q == 0) return res;  // gcd(x, r) = 1 rules this r out
    return resolve_case(case_id, r, candidate_exponents(s.C1, s.C2_scale * r * r));
}

CaseResolution resolve_case(int case_id, u64 r, const std::vector<u64>& exponents)
{
    LehmerShape s = shape_for(case_id);
    if (r == 0 || r > kRMax) throw std::invalid_argument("r out of range");
    const CaseTemplate& t = case_template(case_id);
    CaseResolution res;
    res.case_id = case_id;
    res.r = r;
    res.x_multiplier = s.multiplier;
    for (u64 q : t.coprimality_primes())
        if (r % q == 0) return res;
    res.instance = make_lehmer_instance(s.C1, s.C2_scale * r * r);
    res.exponents = exponents;
    for (u64 p : exponents) {
        for (const auto& sol : solve_C1x2_plus_C2(s.C1, res.instance.C2, p)) {
            LehmerCandidate c;
            c.p = p;
            c.X = sol.x;
            c.x = sol.x * s.multiplier;
            c.w2 = sol.y;
            mpz_class coef = t.x_coef.eval(p);
            std::optional<mpz_class> w1;
            if (c.x % coef == 0) w1 = exact_root(c.x / coef, p);
            if (!w1) {
                c.note = "x is not " + t.x_coef.to_string() + " * w1^p";
                res.candidates.push_back(c);
                continue;
            }
            mpz_class y = 7 * mpz_class(static_cast<unsigned long>(t.y_factor)) * *w1 * c.w2;
            mpz_class yp;
            mpz_pow_ui(yp.get_mpz_t(), y.get_mpz_t(), p);
            if (!t.x_matches(c.x) || seven_cube_sum(c.x, r) != yp) {
                c.note = "descent-consistent but fails the original equation";
                res.candidates.push_back(c);
                continue;
            }
            c.accepted = true;
            c.note = "solution";
            res.candidates.push_back(c);
            res.solutions.push_back({c.x, y, p});
        }
    }
    return res;
}

}  // namespace apsieve
