#include "apsieve/arith.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace apsieve {

namespace {

constexpr u64 kTrialLimit = 1000000;

const std::vector<u64>& small_primes()
{
    static const std::vector<u64> table = primes_up_to(kTrialLimit);
    return table;
}

// Fixed-seed Pollard rho (Brent variant); n odd composite.
u64 rho(u64 n, u64 seed)
{
    u64 c = seed % (n - 1) + 1;
    u64 y = seed % n, m = 128, g = 1, r = 1, q = 1, x = 0, ys = 0;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    while (g == 1) {
        x = y;
        for (u64 i = 0; i < r; ++i) y = f(y);
        u64 k = 0;
        while (k < r && g == 1) {
            ys = y;
            const u64 lim = std::min(m, r - k);
            for (u64 i = 0; i < lim; ++i) {
                y = f(y);
                q = mulmod(q, x > y ? x - y : y - x, n);
            }
            g = gcd(q, n);
            k += m;
        }
        r <<= 1;
    }
    if (g == n) {
        do {
            ys = f(ys);
            g = gcd(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g;
}

void split(u64 n, std::map<u64, int>& out)
{
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    for (u64 seed = 2;; ++seed) {
        u64 d = rho(n, seed);
        if (d != n && d != 1) {
            split(d, out);
            split(n / d, out);
            return;
        }
    }
}

}  // namespace

FactoredInteger::FactoredInteger(std::vector<Term> terms) : factors(std::move(terms))
{
    std::sort(factors.begin(), factors.end(), [](const Term& a, const Term& b) { return a.prime < b.prime; });
    for (size_t i = 0; i < factors.size(); ++i) {
        if (factors[i].prime < 2) throw std::invalid_argument("FactoredInteger: prime < 2");
        if (i && factors[i].prime == factors[i - 1].prime)
            throw std::invalid_argument("FactoredInteger: repeated prime");
    }
}

i64 FactoredInteger::exponent_at(u64 prime, u64 p) const
{
    for (const auto& t : factors)
        if (t.prime == prime) return t.alpha + t.beta * static_cast<i64>(p);
    return 0;
}

bool FactoredInteger::valid_at(u64 p) const
{
    return std::all_of(factors.begin(), factors.end(),
                       [p](const Term& t) { return t.alpha + t.beta * static_cast<i64>(p) >= 0; });
}

mpz_class FactoredInteger::eval(u64 p) const
{
    if (!valid_at(p)) throw std::domain_error("FactoredInteger: negative exponent at p=" + std::to_string(p));
    mpz_class v = 1, t;
    for (const auto& f : factors) {
        mpz_ui_pow_ui(t.get_mpz_t(), f.prime, static_cast<unsigned long>(f.alpha + f.beta * static_cast<i64>(p)));
        v *= t;
    }
    return v;
}

std::string FactoredInteger::to_string() const
{
    if (factors.empty()) return "1";
    std::ostringstream os;
    for (size_t i = 0; i < factors.size(); ++i) {
        const auto& f = factors[i];
        if (i) os << '*';
        os << f.prime << "^(";
        if (f.beta) os << f.beta << "p";
        if (f.alpha > 0 && f.beta) os << '+';
        if (f.alpha || !f.beta) os << f.alpha;
        os << ')';
    }
    return os.str();
}

u64 powmod(u64 base, u64 e, u64 m)
{
    if (m == 1) return 0;
    u64 r = 1;
    base %= m;
    while (e) {
        if (e & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        e >>= 1;
    }
    return r;
}

u64 gcd(u64 a, u64 b) { return std::gcd(a, b); }

u64 invmod(u64 a, u64 m)
{
    i128 t = 0, nt = 1, r = m, nr = a % m;
    while (nr) {
        i128 q = r / nr;
        t -= q * nt;
        std::swap(t, nt);
        r -= q * nr;
        std::swap(r, nr);
    }
    if (r != 1) throw std::domain_error("invmod: not invertible");
    if (t < 0) t += m;
    return static_cast<u64>(t);
}

bool is_prime(u64 n)
{
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while (!(d & 1)) d >>= 1, ++s;
    // This base set is deterministic for all 64-bit n.
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

u64 next_prime(u64 n)
{
    u64 c = n + 1;
    while (!is_prime(c)) ++c;
    return c;
}

std::vector<u64> primes_up_to(u64 n)
{
    std::vector<u64> out;
    if (n < 2) return out;
    std::vector<bool> comp(n + 1, false);
    for (u64 i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= n; j += i) comp[j] = true;
    }
    return out;
}

Factorization factor(u64 n)
{
    if (n == 0 || n > kFactorLimit) throw std::out_of_range("factor: n outside [1, 1e14]");
    Factorization out;
    out.n = n;
    std::map<u64, int> found;
    for (u64 p : small_primes()) {
        if (p * p > n) break;
        while (n % p == 0) {
            ++found[p];
            n /= p;
        }
    }
    // no factor below 1e6 remains, so a cofactor below 1e12 is prime
    if (n > 1) {
        if (n < kTrialLimit * kTrialLimit) ++found[n];
        else split(n, found);
    }
    for (auto [p, e] : found) out.factors.push_back({p, e});
    return out;
}

std::pair<u64, u64> squarefree_decompose(u64 n)
{
    u64 c = 1, d = 1;
    for (auto [p, e] : factor(n).factors) {
        if (e & 1) c *= p;
        for (int i = 0; i < e / 2; ++i) d *= p;
    }
    return {c, d};
}

u64 radical(u64 n)
{
    u64 r = 1;
    for (auto [p, e] : factor(n).factors) r *= p;
    return r;
}

int jacobi(i64 a, u64 n)
{
    if (n == 0 || !(n & 1)) throw std::invalid_argument("jacobi: n must be odd and positive");
    u64 x = mod_signed(a, n), m = n;
    int t = 1;
    while (x) {
        while (!(x & 1)) {
            x >>= 1;
            const u64 r = m & 7;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(x, m);
        if ((x & 3) == 3 && (m & 3) == 3) t = -t;
        x %= m;
    }
    return m == 1 ? t : 0;
}

int jacobi(const mpz_class& a, u64 n)
{
    if (n == 0 || !(n & 1)) throw std::invalid_argument("jacobi: n must be odd and positive");
    mpz_class r = a % mpz_class(static_cast<unsigned long>(n));
    if (r < 0) r += static_cast<unsigned long>(n);
    return jacobi(static_cast<i64>(r.get_ui()), n);
}

std::optional<u64> sqrt_mod(i64 a, u64 q)
{
    if (q == 2) return mod_signed(a, 2);
    if (!is_prime(q)) throw std::invalid_argument("sqrt_mod: modulus not prime");
    const u64 x = mod_signed(a, q);
    if (x == 0) return 0;
    if (powmod(x, (q - 1) / 2, q) != 1) return std::nullopt;
    u64 s = 0, Q = q - 1;
    while (!(Q & 1)) Q >>= 1, ++s;
    u64 z = 2;
    while (powmod(z, (q - 1) / 2, q) != q - 1) ++z;
    u64 M = s, c = powmod(z, Q, q), t = powmod(x, Q, q), R = powmod(x, (Q + 1) / 2, q);
    while (t != 1) {
        u64 i = 0, tt = t;
        while (tt != 1) tt = mulmod(tt, tt, q), ++i;
        u64 b = c;
        for (u64 j = 0; j + 1 < M - i; ++j) b = mulmod(b, b, q);
        M = i;
        c = mulmod(b, b, q);
        t = mulmod(t, c, q);
        R = mulmod(R, b, q);
    }
    return std::min(R, q - R);
}

u64 eval_mod(const FactoredInteger& f, u64 p, u64 q)
{
    u64 v = 1 % q;
    for (const auto& t : f.factors) {
        const i64 e = t.alpha + t.beta * static_cast<i64>(p);
        if (e < 0) throw std::domain_error("eval_mod: negative exponent");
        v = mulmod(v, powmod(t.prime % q, static_cast<u64>(e), q), q);
    }
    return v;
}

std::optional<mpz_class> exact_root(const mpz_class& x, unsigned long n)
{
    if (x < 0) {
        if (!(n & 1)) return std::nullopt;
        auto r = exact_root(-x, n);
        if (!r) return std::nullopt;
        return mpz_class(-*r);
    }
    mpz_class r;
    if (mpz_root(r.get_mpz_t(), x.get_mpz_t(), n) == 0) return std::nullopt;
    return r;
}

bool is_square(const mpz_class& x) { return x >= 0 && mpz_perfect_square_p(x.get_mpz_t()) != 0; }

int valuation(u64 n, u64 q)
{
    if (n == 0) throw std::domain_error("valuation of zero");
    int v = 0;
    while (n % q == 0) n /= q, ++v;
    return v;
}

int valuation(const mpz_class& n, u64 q)
{
    if (n == 0) throw std::domain_error("valuation of zero");
    mpz_class t = n;
    int v = 0;
    while (mpz_divisible_ui_p(t.get_mpz_t(), q)) {
        mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), q);
        ++v;
    }
    return v;
}

u64 primitive_root(u64 q)
{
    if (q == 2) return 1;
    std::vector<u64> ps;
    for (auto [p, e] : factor(q - 1).factors) ps.push_back(p);
    for (u64 g = 2;; ++g) {
        if (std::all_of(ps.begin(), ps.end(), [&](u64 p) { return powmod(g, (q - 1) / p, q) != 1; })) return g;
    }
}

}  // namespace apsieve
