#include "apsieve/quadfield.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <sstream>
#include <unordered_set>

namespace apsieve {

namespace {

// ---- generic integer helpers (T = i128 or mpz_class) ----

template <class T>
T fmod_pos(const T& a, const T& m)
{
    T r = a % m;
    if (r < 0) r += m;
    return r;
}

template <class T>
T floor_div(const T& a, const T& b)
{
    T q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
    return q;
}

template <class T>
T tabs(const T& a) { return a < 0 ? T(-a) : a; }

// returns g = gcd(a, b) >= 0 with x*a + y*b = g
template <class T>
T xgcd(T a, T b, T& x, T& y)
{
    T x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        T q = floor_div(a, b);
        T t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
        t = y0 - q * y1;
        y0 = y1;
        y1 = t;
    }
    if (a < 0) {
        a = -a;
        x0 = -x0;
        y0 = -y0;
    }
    x = x0;
    y = y0;
    return a;
}

template <class T>
struct GForm {
    T a, b, c;
};

template <class T>
GForm<T> greduce(GForm<T> f)
{
    for (;;) {
        const T two_a = 2 * f.a;
        if (f.b > f.a || f.b <= -f.a) {
            // shift b into (-a, a]
            T k = floor_div(T(f.a - f.b), two_a);
            T nb = f.b + two_a * k;
            f.c = f.a * k * k + f.b * k + f.c;
            f.b = nb;
        }
        if (f.a > f.c) {
            std::swap(f.a, f.c);
            f.b = -f.b;
            continue;
        }
        if (f.a == f.c && f.b < 0) f.b = -f.b;
        return f;
    }
}

// Composition of primitive forms of discriminant D; d1 receives the content of the ideal product.
template <class T>
GForm<T> gcompose(GForm<T> f1, GForm<T> f2, T& d1)
{
    if (f1.a > f2.a) std::swap(f1, f2);
    const T s = (f1.b + f2.b) / 2;
    const T n = f2.b - s;
    T y1, d;
    if (f2.a % f1.a == 0) {
        y1 = 0;
        d = f1.a;
    } else {
        T u, v;
        d = xgcd(f2.a, f1.a, u, v);
        y1 = u;
    }
    T x2, y2;
    if (s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        d1 = xgcd(s, d, x2, y2);
        y2 = -y2;
    }
    const T v1 = f1.a / d1;
    const T v2 = f2.a / d1;
    const T r = fmod_pos(T(y1 * y2 * n - x2 * f2.c), v1);
    GForm<T> out;
    out.b = f2.b + 2 * v2 * r;
    out.a = v1 * v2;
    out.c = (f2.c * d1 + r * (f2.b + v2 * r)) / v1;
    return out;
}

Form to_form(const GForm<i128>& g) { return Form{static_cast<i64>(g.a), static_cast<i64>(g.b), static_cast<i64>(g.c)}; }
GForm<i128> from_form(const Form& f) { return GForm<i128>{f.a, f.b, f.c}; }

u64 form_key(const Form& f)
{
    return (static_cast<u64>(f.a) << 32) ^ static_cast<u64>(static_cast<std::uint32_t>(f.b));
}

// ---- reduced-form enumeration ----

std::vector<u64> sq_roots_prime_power(i64 D, u64 l, int e)
{
    // all r mod l^e with r^2 = D, found by digit-wise lifting
    std::vector<u64> cur;
    for (u64 r = 0; r < l; ++r)
        if (mod_signed(static_cast<i64>((static_cast<i128>(r) * r - D) % static_cast<i128>(l)), l) == 0) cur.push_back(r);
    u64 mod = l;
    for (int k = 1; k < e; ++k) {
        const u64 next = mod * l;
        std::vector<u64> nxt;
        for (u64 r : cur) {
            for (u64 t = 0; t < l; ++t) {
                const u64 c = r + t * mod;
                const i128 v = static_cast<i128>(c) * c - D;
                if (v % static_cast<i128>(next) == 0) nxt.push_back(c);
            }
        }
        cur.swap(nxt);
        mod = next;
        if (cur.empty()) break;
    }
    return cur;
}

template <class F>
void for_each_reduced(i64 D, F&& fn)
{
    const u64 absD = static_cast<u64>(-D);
    const u64 amax = static_cast<u64>(std::sqrt(static_cast<long double>(absD) / 3.0L)) + 1;
    std::vector<std::uint32_t> spf(amax + 1, 0);
    for (u64 i = 2; i <= amax; ++i) {
        if (spf[i]) continue;
        for (u64 j = i; j <= amax; j += i)
            if (!spf[j]) spf[j] = static_cast<std::uint32_t>(i);
    }
    std::vector<std::pair<u64, std::vector<u64>>> parts;
    for (u64 a = 1; a <= amax; ++a) {
        if (3 * static_cast<u128>(a) * a > absD) break;
        // roots of b^2 = D mod 4a via CRT over prime powers
        parts.clear();
        u64 t = a;
        int e2 = 2;
        while (t % 2 == 0) t /= 2, ++e2;
        parts.push_back({u64(1) << e2, sq_roots_prime_power(D, 2, e2)});
        bool ok = !parts.back().second.empty();
        while (ok && t > 1) {
            const u64 l = spf[t];
            int e = 0;
            u64 pe = 1;
            while (t % l == 0) t /= l, ++e, pe *= l;
            parts.push_back({pe, sq_roots_prime_power(D, l, e)});
            ok = !parts.back().second.empty();
        }
        if (!ok) continue;
        std::vector<u64> roots{0};
        u64 M = 1;
        for (auto& [pe, rs] : parts) {
            std::vector<u64> nr;
            const u64 inv = invmod(M % pe, pe);
            for (u64 r0 : roots)
                for (u64 r1 : rs) {
                    // x = r0 + M * ((r1 - r0) * M^-1 mod pe)
                    const u64 k = mulmod(mod_signed(static_cast<i64>(r1) - static_cast<i64>(r0 % pe), pe), inv, pe);
                    nr.push_back(r0 + M * k);
                }
            M *= pe;
            roots.swap(nr);
        }
        const i64 ia = static_cast<i64>(a);
        std::vector<i64> bs;
        for (u64 r : roots) {
            i64 b = static_cast<i64>(r % (2 * a));
            if (b > ia) b -= 2 * ia;
            bs.push_back(b);
        }
        std::sort(bs.begin(), bs.end());
        bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
        for (i64 b : bs) {
            const i128 c128 = (static_cast<i128>(b) * b - D) / (4 * static_cast<i128>(a));
            if (c128 < ia) continue;
            const i64 c = static_cast<i64>(c128);
            if (c == ia && b < 0) continue;
            if (std::gcd(std::gcd(a, static_cast<u64>(b < 0 ? -b : b)), static_cast<u64>(c)) != 1) continue;
            fn(Form{ia, b, c});
        }
    }
}

std::vector<std::pair<u64, int>> small_factor(u64 n)
{
    std::vector<std::pair<u64, int>> out;
    for (auto [p, e] : factor(n).factors) out.push_back({p, e});
    return out;
}

FieldElement normalized(mpz_class x, mpz_class y, unsigned den, bool half)
{
    while (den > 1 && mpz_even_p(x.get_mpz_t()) && mpz_even_p(y.get_mpz_t())) {
        x /= 2;
        y /= 2;
        den /= 2;
    }
    if (den == 2 && !half) throw std::domain_error("FieldElement: not integral");
    if (den > 2) throw std::domain_error("FieldElement: not integral");
    FieldElement e;
    e.x = std::move(x);
    e.y = std::move(y);
    e.den = den;
    return e;
}

std::vector<FieldElement> units(const QuadraticField& K)
{
    std::vector<FieldElement> u{make_element(K, 1, 0), make_element(K, -1, 0)};
    if (K.m == 1) {
        u.push_back(make_element(K, 0, 1));
        u.push_back(make_element(K, 0, -1));
    } else if (K.m == 3) {
        for (int sx : {1, -1})
            for (int sy : {1, -1}) u.push_back(make_element(K, sx, sy, 2));
    }
    return u;
}

// Unit-independent representative: argument in [0, 2*pi/|units|).
FieldElement canonical_associate(const QuadraticField& K, const FieldElement& g)
{
    const auto us = units(K);
    for (const auto& u : us) {
        FieldElement e = mul(K, g, u);
        bool ok;
        if (us.size() == 2) ok = e.x > 0 || (e.x == 0 && e.y > 0);
        else if (us.size() == 4) ok = e.x > 0 && e.y >= 0;
        else ok = e.x > 0 && e.y >= 0 && e.y < e.x;
        if (ok) return e;
    }
    return g;
}

}  // namespace

// ---- fields and elements ----

QuadraticField make_field(u64 m)
{
    if (m == 0) throw std::invalid_argument("make_field: m must be positive");
    for (auto [p, e] : factor(m).factors)
        if (e > 1) throw std::invalid_argument("make_field: m not squarefree");
    QuadraticField K;
    K.m = m;
    K.discriminant = (m % 4 == 3) ? -static_cast<i64>(m) : -4 * static_cast<i64>(m);
    return K;
}

FieldElement make_element(const QuadraticField& K, mpz_class x, mpz_class y, unsigned den)
{
    if (den != 1 && den != 2) throw std::invalid_argument("make_element: den must be 1 or 2");
    if (den == 2 && K.half_integral() && mpz_even_p(x.get_mpz_t()) != mpz_even_p(y.get_mpz_t()))
        throw std::domain_error("make_element: x, y parity mismatch");
    return normalized(std::move(x), std::move(y), den, K.half_integral());
}

FieldElement mul(const QuadraticField& K, const FieldElement& a, const FieldElement& b)
{
    mpz_class x = a.x * b.x - mpz_class(static_cast<unsigned long>(K.m)) * a.y * b.y;
    mpz_class y = a.x * b.y + a.y * b.x;
    return normalized(std::move(x), std::move(y), a.den * b.den, K.half_integral());
}

FieldElement pow(const QuadraticField& K, const FieldElement& a, unsigned long e)
{
    FieldElement r = make_element(K, 1, 0), b = a;
    while (e) {
        if (e & 1) r = mul(K, r, b);
        e >>= 1;
        if (e) b = mul(K, b, b);
    }
    return r;
}

FieldElement conj(const FieldElement& a)
{
    FieldElement c = a;
    c.y = -c.y;
    return c;
}

mpz_class norm(const QuadraticField& K, const FieldElement& a)
{
    mpz_class n = a.x * a.x + mpz_class(static_cast<unsigned long>(K.m)) * a.y * a.y;
    return n / (a.den * a.den);
}

std::string to_string(const FieldElement& a)
{
    std::ostringstream os;
    os << '(' << a.x.get_str() << (a.y < 0 ? " - " : " + ") << mpz_class(abs(a.y)).get_str() << "*sqrt(-m))";
    if (a.den != 1) os << '/' << a.den;
    return os.str();
}

const char* kind_name(PrimeKind k)
{
    switch (k) {
    case PrimeKind::split: return "split";
    case PrimeKind::inert: return "inert";
    case PrimeKind::ramified: return "ramified";
    }
    return "?";
}

PrimeIdeal split_type(const QuadraticField& K, u64 q)
{
    if (!is_prime(q)) throw std::invalid_argument("split_type: q not prime");
    PrimeIdeal P;
    P.q = q;
    if (q == 2) {
        if (!K.half_integral()) P.kind = PrimeKind::ramified;
        else if (K.m % 8 == 7) P.kind = PrimeKind::split, P.root = 0;
        else P.kind = PrimeKind::inert;
        return P;
    }
    if (K.m % q == 0) {
        P.kind = PrimeKind::ramified;
        return P;
    }
    if (jacobi(-static_cast<i64>(K.m % q), q) == 1) {
        P.kind = PrimeKind::split;
        P.root = *sqrt_mod(-static_cast<i64>(K.m % q), q);
    } else {
        P.kind = PrimeKind::inert;
    }
    return P;
}

PrimeIdeal conjugate(const PrimeIdeal& P)
{
    if (P.kind != PrimeKind::split) return P;
    PrimeIdeal c = P;
    c.root = P.q == 2 ? 1 - P.root : (P.root == 0 ? 0 : P.q - P.root);
    c.conjugate_flag = !P.conjugate_flag;
    return c;
}

std::vector<PrimeIdeal> primes_above(const QuadraticField& K, u64 q)
{
    PrimeIdeal P = split_type(K, q);
    if (P.kind == PrimeKind::split) return {P, conjugate(P)};
    return {P};
}

mpz_class padic_root(const QuadraticField& K, const PrimeIdeal& P, int prec)
{
    if (P.kind != PrimeKind::split) throw std::invalid_argument("padic_root: prime not split");
    const mpz_class m(static_cast<unsigned long>(K.m));
    if (P.q == 2) {
        prec = std::max(prec, 3);
        mpz_class S = 1, mod;
        for (int k = 3; k < prec; ++k) {
            mpz_ui_pow_ui(mod.get_mpz_t(), 2, k + 1);
            if ((S * S + m) % mod != 0) {
                mpz_class step;
                mpz_ui_pow_ui(step.get_mpz_t(), 2, k - 1);
                S += step;
            }
        }
        mpz_ui_pow_ui(mod.get_mpz_t(), 2, prec);
        S %= mod;
        // omega = (1 + S)/2 must reduce to the label
        const bool want3 = P.root == 0;
        if ((mpz_fdiv_ui(S.get_mpz_t(), 4) == 3) != want3) S = mod - S;
        return S;
    }
    mpz_class S = P.root, mod = P.q;
    mpz_class target;
    mpz_ui_pow_ui(target.get_mpz_t(), P.q, prec);
    while (mod < target) {
        mod *= mod;
        if (mod > target) mod = target;
        mpz_class inv, two_s = 2 * S;
        mpz_invert(inv.get_mpz_t(), two_s.get_mpz_t(), mod.get_mpz_t());
        S = S - (S * S + m) * inv;
        S %= mod;
        if (S < 0) S += mod;
    }
    S %= target;
    return S;
}

int valuation(const QuadraticField& K, const FieldElement& e, const PrimeIdeal& P)
{
    if (e.is_zero()) throw std::domain_error("valuation of zero element");
    const mpz_class nn = e.x * e.x + mpz_class(static_cast<unsigned long>(K.m)) * e.y * e.y;
    const int vn = apsieve::valuation(nn, P.q);
    const int vd = e.den == 2 && P.q == 2 ? 1 : 0;
    switch (P.kind) {
    case PrimeKind::inert: return (vn - 2 * vd) / 2;
    case PrimeKind::ramified: return vn - 2 * vd;
    case PrimeKind::split: break;
    }
    const int prec = vn + (P.q == 2 ? 4 : 2);
    const mpz_class S = padic_root(K, P, prec);
    mpz_class mod;
    mpz_ui_pow_ui(mod.get_mpz_t(), P.q, prec);
    mpz_class t = (e.x + e.y * S) % mod;
    if (t < 0) t += mod;
    return apsieve::valuation(t, P.q) - vd;
}

int valuation(const QuadraticField&, const mpz_class& rational, const PrimeIdeal& P)
{
    return P.ramification() * apsieve::valuation(rational, P.q);
}

u64 residue_at_split(const QuadraticField& K, const FieldElement& e, const PrimeIdeal& P)
{
    if (P.kind != PrimeKind::split) throw std::invalid_argument("residue_at_split: prime not split");
    if (!e.is_zero() && valuation(K, e, P) < 0) throw std::domain_error("residue_at_split: negative valuation");
    const mpz_class S = padic_root(K, P, 3);
    mpz_class t = e.x + e.y * S;
    if (e.den == 2) {
        if (P.q == 2) t /= 2;  // exact: x + yS is even
        else t *= static_cast<unsigned long>((P.q + 1) / 2);
    }
    return mpz_fdiv_ui(t.get_mpz_t(), P.q);
}

// ---- forms ----

Form reduce_form(i64 a, i64 b, i64 c) { return to_form(greduce(GForm<i128>{a, b, c})); }

Form compose(const Form& f, const Form& g, i64)
{
    i128 d1;
    return to_form(greduce(gcompose(from_form(f), from_form(g), d1)));
}

Form identity_form(i64 disc)
{
    const i64 b = disc & 1 ? 1 : 0;
    return Form{1, b, (b * b - disc) / 4};
}

Form form_pow(const Form& f, u64 e, i64 disc)
{
    Form r = identity_form(disc), b = f;
    while (e) {
        if (e & 1) r = compose(r, b, disc);
        e >>= 1;
        if (e) b = compose(b, b, disc);
    }
    return r;
}

std::vector<Form> reduced_forms(i64 disc)
{
    if (disc >= 0 || ((disc % 4) != 0 && (disc % 4) != -3)) throw std::invalid_argument("reduced_forms: bad discriminant");
    std::vector<Form> out;
    for_each_reduced(disc, [&](const Form& f) { out.push_back(f); });
    return out;
}

// ---- ideals ----

Ideal unit_ideal(const QuadraticField& K)
{
    Ideal I;
    I.b = K.half_integral() ? 1 : 0;
    return I;
}

Ideal ideal_of(const QuadraticField& K, const PrimeIdeal& P)
{
    Ideal I;
    const i64 q = static_cast<i64>(P.q);
    auto fold = [](i64 b, i64 a) {
        i64 r = ((b % (2 * a)) + 2 * a) % (2 * a);
        return r > a ? r - 2 * a : r;
    };
    switch (P.kind) {
    case PrimeKind::inert:
        I = unit_ideal(K);
        I.content = q;
        return I;
    case PrimeKind::ramified:
        I.a = q;
        if (q == 2) I.b = (K.m & 1) ? 2 : 0;
        else I.b = K.half_integral() ? q : 0;
        return I;
    case PrimeKind::split:
        break;
    }
    I.a = q;
    if (q == 2) {
        I.b = P.root == 0 ? -1 : 1;
    } else if (K.half_integral()) {
        const i64 s = static_cast<i64>(P.root);
        I.b = fold((s & 1) ? s : s + q, q);
    } else {
        I.b = fold(2 * static_cast<i64>(P.root), q);
    }
    return I;
}

Ideal ideal_mul(const QuadraticField& K, const Ideal& I, const Ideal& J)
{
    const mpz_class D(static_cast<long>(K.discriminant));
    GForm<mpz_class> f{I.a, I.b, (I.b * I.b - D) / (4 * I.a)};
    GForm<mpz_class> g{J.a, J.b, (J.b * J.b - D) / (4 * J.a)};
    mpz_class d1;
    GForm<mpz_class> h = gcompose(f, g, d1);
    Ideal out;
    out.content = I.content * J.content * d1;
    out.a = h.a;
    mpz_class two_a = 2 * h.a;
    mpz_class b = h.b % two_a;
    if (b < 0) b += two_a;
    if (b > h.a) b -= two_a;
    out.b = b;
    return out;
}

Ideal ideal_pow(const QuadraticField& K, const Ideal& I, u64 e)
{
    Ideal r = unit_ideal(K), b = I;
    while (e) {
        if (e & 1) r = ideal_mul(K, r, b);
        e >>= 1;
        if (e) b = ideal_mul(K, b, b);
    }
    return r;
}

mpz_class ideal_norm(const Ideal& I) { return I.content * I.content * I.a; }

Form ideal_class(const QuadraticField& K, const Ideal& I)
{
    const mpz_class D(static_cast<long>(K.discriminant));
    GForm<mpz_class> f{I.a, I.b, (I.b * I.b - D) / (4 * I.a)};
    f = greduce(f);
    return Form{f.a.get_si(), f.b.get_si(), f.c.get_si()};
}

Ideal ideal_from_form(const Form& f)
{
    Ideal I;
    I.a = static_cast<long>(f.a);
    I.b = static_cast<long>(f.b);
    return I;
}

std::optional<FieldElement> principal_generator(const QuadraticField& K, const Ideal& I)
{
    const mpz_class D(static_cast<long>(K.discriminant));
    const mpz_class a = I.a, b = I.b, c = (b * b - D) / (4 * a);
    // norm form of X*a + Y*(-b + sqrt D)/2, divided by a
    auto Q = [&](const mpz_class& X, const mpz_class& Y) { return mpz_class(a * X * X - b * X * Y + c * Y * Y); };
    auto B2 = [&](const mpz_class& X1, const mpz_class& Y1, const mpz_class& X2, const mpz_class& Y2) {
        return mpz_class(2 * a * X1 * X2 - b * (X1 * Y2 + Y1 * X2) + 2 * c * Y1 * Y2);
    };
    mpz_class X1 = 1, Y1 = 0, X2 = 0, Y2 = 1;
    for (;;) {
        mpz_class q1 = Q(X1, Y1), q2 = Q(X2, Y2);
        if (q2 < q1) {
            std::swap(X1, X2);
            std::swap(Y1, Y2);
            std::swap(q1, q2);
        }
        mpz_class num = B2(X1, Y1, X2, Y2) + q1, mu;
        mpz_class den = 2 * q1;
        mpz_fdiv_q(mu.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        if (mu == 0) break;
        X2 -= mu * X1;
        Y2 -= mu * Y1;
    }
    if (Q(X1, Y1) != 1) return std::nullopt;
    FieldElement g;
    if (K.half_integral()) g = make_element(K, I.content * (2 * X1 * a - Y1 * b), I.content * Y1, 2);
    else g = make_element(K, I.content * (X1 * a - Y1 * b / 2), I.content * Y1, 1);
    return canonical_associate(K, g);
}

// ---- class groups ----

u64 class_number(u64 m)
{
    const QuadraticField K = make_field(m);
    u64 h = 0;
    for_each_reduced(K.discriminant, [&](const Form&) { ++h; });
    return h;
}

namespace {

ClassGroup compute_structure(const QuadraticField& K)
{
    const i64 D = K.discriminant;
    const std::vector<Form> forms = reduced_forms(D);
    ClassGroup G;
    G.m = K.m;
    G.h = forms.size();
    if (G.h > kClassTableLimit) throw std::length_error("class_group: class number above table limit");
    if (G.h == 1) return G;
    const Form id = identity_form(D);
    auto key = [](const Form& f) { return form_key(f); };

    struct Gen {
        Form f;
        u64 order;
    };
    std::vector<std::vector<Gen>> sylows;
    for (auto [l, v] : small_factor(G.h)) {
        u64 lv = 1;
        for (int i = 0; i < v; ++i) lv *= l;
        const u64 cof = G.h / lv;
        std::unordered_map<u64, Form> sub;
        for (const Form& x : forms) {
            Form y = form_pow(x, cof, D);
            sub.emplace(key(y), y);
            if (sub.size() == lv) break;
        }
        std::vector<Form> elems;
        for (auto& [k, f] : sub) elems.push_back(f);
        std::sort(elems.begin(), elems.end(), [](const Form& p, const Form& q) {
            return std::tie(p.a, p.b) < std::tie(q.a, q.b);
        });
        std::unordered_set<u64> H{key(id)};
        std::vector<Form> Hlist{id};
        std::vector<Gen> basis;
        while (H.size() < lv) {
            // element of maximal order modulo H
            Form best = id;
            u64 best_o = 1;
            for (const Form& x : elems) {
                u64 o = 1;
                Form t = x;
                while (!H.count(key(t))) t = form_pow(t, l, D), o *= l;
                if (o > best_o) best_o = o, best = x;
            }
            // coset representative with the same absolute order
            Form rep = best;
            for (const Form& hh : Hlist) {
                Form cand = compose(best, hh, D);
                if (form_pow(cand, best_o, D) == id) {
                    rep = cand;
                    break;
                }
            }
            basis.push_back({rep, best_o});
            std::vector<Form> grown;
            Form pw = id;
            for (u64 i = 0; i < best_o; ++i) {
                for (const Form& hh : Hlist) grown.push_back(compose(hh, pw, D));
                pw = compose(pw, rep, D);
            }
            Hlist.swap(grown);
            H.clear();
            for (const Form& f : Hlist) H.insert(key(f));
        }
        std::sort(basis.begin(), basis.end(), [](const Gen& p, const Gen& q) { return p.order > q.order; });
        sylows.push_back(std::move(basis));
    }
    size_t r = 0;
    for (auto& s : sylows) r = std::max(r, s.size());
    std::vector<Gen> inv(r, Gen{id, 1});
    for (auto& s : sylows)
        for (size_t i = 0; i < s.size(); ++i) {
            inv[i].f = compose(inv[i].f, s[i].f, D);
            inv[i].order *= s[i].order;
        }
    std::reverse(inv.begin(), inv.end());
    for (auto& g : inv) {
        G.cyclic_factors.push_back(g.order);
        G.generators.push_back(g.f);
    }
    return G;
}

std::shared_mutex g_memo_mutex;
std::map<u64, std::shared_ptr<const ClassGroupTable>> g_memo;

}  // namespace

ClassGroupTable::ClassGroupTable(const QuadraticField& K, ClassGroup G) : group_(std::move(G)), disc_(K.discriminant)
{
    const auto& d = group_.cyclic_factors;
    std::vector<Form> elems(group_.h);
    elems[0] = identity_form(disc_);
    u64 stride = 1;
    for (size_t i = 0; i < d.size(); ++i) {
        const u64 next = stride * d[i];
        for (u64 k = stride; k < next; ++k) elems[k] = compose(elems[k - stride], group_.generators[i], disc_);
        stride = next;
    }
    for (u64 k = 0; k < group_.h; ++k) index_.emplace(form_key(elems[k]), k);
    if (index_.size() != group_.h) throw std::logic_error("ClassGroupTable: generators do not span the group");
}

std::vector<u64> ClassGroupTable::coords_of(u64 index) const
{
    std::vector<u64> c;
    for (u64 d : group_.cyclic_factors) {
        c.push_back(index % d);
        index /= d;
    }
    return c;
}

u64 ClassGroupTable::index_of(const std::vector<u64>& coords) const
{
    u64 idx = 0, stride = 1;
    for (size_t i = 0; i < group_.cyclic_factors.size(); ++i) {
        idx += (coords[i] % group_.cyclic_factors[i]) * stride;
        stride *= group_.cyclic_factors[i];
    }
    return idx;
}

std::vector<u64> ClassGroupTable::dlog(const Form& f) const
{
    const Form r = reduce_form(f.a, f.b, f.c);
    auto it = index_.find(form_key(r));
    if (it == index_.end()) throw std::invalid_argument("dlog: form not in class group");
    return coords_of(it->second);
}

Form ClassGroupTable::element(const std::vector<u64>& coords) const
{
    Form f = identity_form(disc_);
    for (size_t i = 0; i < coords.size(); ++i) f = compose(f, form_pow(group_.generators[i], coords[i], disc_), disc_);
    return f;
}

std::shared_ptr<const ClassGroupTable> class_group_table(u64 m)
{
    {
        std::shared_lock lock(g_memo_mutex);
        auto it = g_memo.find(m);
        if (it != g_memo.end()) return it->second;
    }
    const QuadraticField K = make_field(m);
    auto table = std::make_shared<const ClassGroupTable>(K, compute_structure(K));
    std::unique_lock lock(g_memo_mutex);
    auto [it, inserted] = g_memo.emplace(m, table);
    return it->second;
}

ClassGroup class_group(u64 m)
{
    if (m > 10000000000000ULL) throw std::out_of_range("class_group: m above 1e13");
    return class_group_table(m)->group();
}

}  // namespace apsieve
