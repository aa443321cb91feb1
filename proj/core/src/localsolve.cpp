#include "apsieve/localsolve.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace apsieve {

// ---------------------------------------------------------------- PrimeMap

PrimeMap PrimeMap::of(u64 n)
{
    if (n == 0) throw std::invalid_argument("PrimeMap: zero");
    PrimeMap m;
    for (const auto& f : factor(n).factors) m.e[f.prime] = f.exp;
    return m;
}

PrimeMap PrimeMap::of(const FactoredInteger& f, u64 p)
{
    PrimeMap m;
    for (const auto& t : f.factors) {
        const i64 k = t.alpha + t.beta * static_cast<i64>(p);
        if (k < 0) throw std::invalid_argument("PrimeMap: negative exponent at this p");
        if (k > 0) m.e[t.prime] = k;
    }
    return m;
}

mpz_class PrimeMap::value() const
{
    mpz_class v = 1, t;
    for (auto& [l, k] : e) {
        mpz_ui_pow_ui(t.get_mpz_t(), l, static_cast<unsigned long>(k));
        v *= t;
    }
    return v;
}

u64 PrimeMap::mod(u64 m) const
{
    u64 v = 1 % m;
    for (auto& [l, k] : e) v = mulmod(v, powmod(l % m, static_cast<u64>(k), m), m);
    return v;
}

i64 PrimeMap::v(u64 l) const
{
    auto it = e.find(l);
    return it == e.end() ? 0 : it->second;
}

u64 PrimeMap::unit_part_mod(u64 q, u64 m) const
{
    u64 v = 1 % m;
    for (auto& [l, k] : e)
        if (l != q) v = mulmod(v, powmod(l % m, static_cast<u64>(k), m), m);
    return v;
}

std::vector<u64> PrimeMap::primes() const
{
    std::vector<u64> out;
    for (auto& [l, k] : e)
        if (k > 0) out.push_back(l);
    return out;
}

PrimeMap& PrimeMap::mul(u64 l, i64 k)
{
    const i64 n = v(l) + k;
    if (n < 0) throw std::logic_error("PrimeMap: exponent would go negative");
    if (n == 0) e.erase(l);
    else e[l] = n;
    return *this;
}

PrimeMap operator*(const PrimeMap& x, const PrimeMap& y)
{
    PrimeMap r = x;
    for (auto& [l, k] : y.e) r.mul(l, k);
    return r;
}

// ---------------------------------------------------------------- reduction

namespace {

void apply_step(CoprimeForm& f, const ReductionStep& s, u64 p)
{
    const i64 P = static_cast<i64>(p);
    switch (s.kind) {
    case 'g':  // A = l A', C = l C' and rho^p: multiply through by l^(2p-1) after sigma -> l sigma'
        f.A.mul(s.prime, -1);
        f.B.mul(s.prime, 2 * P - 1);
        f.C.mul(s.prime, -1);
        break;
    case 'h':  // B = l B', C = l C' forces l | rho
        f.A.mul(s.prime, P - 1);
        f.B.mul(s.prime, -1);
        f.C.mul(s.prime, -1);
        break;
    case 'd':
        f.A.mul(s.prime, -s.count);
        f.B.mul(s.prime, -s.count);
        f.C.mul(s.prime, -s.count);
        break;
    default:
        throw std::invalid_argument("reduction step: unknown kind");
    }
}

void check_gcd_one(const PrimeMap& a, const PrimeMap& b, const PrimeMap& c)
{
    for (auto& [l, k] : a.e)
        if (k > 0 && b.v(l) > 0 && c.v(l) > 0) throw std::invalid_argument("reduce_coprime: gcd(a, b, c) != 1");
}

}  // namespace

Reduction reduce_coprime(const PrimeMap& a, const PrimeMap& b, const PrimeMap& c, u64 p)
{
    check_gcd_one(a, b, c);
    Reduction out;
    CoprimeForm& f = out.form;
    f.A = a, f.B = b, f.C = c;
    for (;;) {
        std::set<u64> ls;
        for (auto* m : {&f.A, &f.B, &f.C})
            for (auto& [l, k] : m->e) ls.insert(l);
        bool changed = false;
        for (u64 l : ls) {
            const bool da = f.A.v(l) > 0, db = f.B.v(l) > 0, dc = f.C.v(l) > 0;
            ReductionStep s{0, l, 1};
            if (da && db && dc) s = {'d', l, std::min({f.A.v(l), f.B.v(l), f.C.v(l)})};
            else if (da && dc) s.kind = 'g';
            else if (db && dc) s.kind = 'h';
            else if (da && db) {
                out.contradiction = true;
                out.witness_prime = l;
                return out;
            } else continue;
            apply_step(f, s, p);
            f.reduction_trace.push_back(s);
            changed = true;
            break;
        }
        if (!changed) return out;
    }
}

Reduction reduce_coprime(u64 a, u64 b, u64 c, u64 p)
{
    return reduce_coprime(PrimeMap::of(a), PrimeMap::of(b), PrimeMap::of(c), p);
}

Reduction replay_trace(const PrimeMap& a, const PrimeMap& b, const PrimeMap& c, u64 p,
                       const std::vector<ReductionStep>& trace)
{
    Reduction out;
    out.form.A = a, out.form.B = b, out.form.C = c;
    for (const auto& s : trace) {
        apply_step(out.form, s, p);
        out.form.reduction_trace.push_back(s);
    }
    for (auto& [l, k] : out.form.A.e)
        if (out.form.B.v(l) > 0 && out.form.C.v(l) == 0) {
            out.contradiction = true;
            out.witness_prime = l;
        }
    return out;
}

std::optional<u64> qr_obstruction(const CoprimeForm& f)
{
    for (u64 q : f.A.primes()) {
        if (q == 2) continue;
        const u64 bc = mulmod(f.B.mod(q), f.C.mod(q), q);
        if (jacobi(-static_cast<i64>(bc), q) == -1) return q;
    }
    return std::nullopt;
}

bool qr_necessary(const CoprimeForm& f) { return !qr_obstruction(f).has_value(); }

// ---------------------------------------------------------------- q-adic solubility

const char* solubility_name(Solubility s)
{
    switch (s) {
    case Solubility::insoluble: return "insoluble";
    case Solubility::soluble: return "soluble";
    case Solubility::unknown: return "unknown";
    }
    return "?";
}

namespace {

// Precision at which unit n-th powers of Z_q are recognised.
int power_precision(u64 q, u64 n)
{
    if (q == 2) return n % 2 ? 1 : 2 + valuation(n, 2);
    return 1 + valuation(n, q);
}

struct UnitPowers {
    u64 q, n, M, phi, g;  // g generates the unit group for odd q
    int E;

    UnitPowers(u64 q_, u64 n_, int E_) : q(q_), n(n_), M(1), phi(0), g(0), E(E_)
    {
        for (int i = 0; i < E; ++i) M *= q;
        phi = M / q * (q - 1);
        if (q != 2) {
            g = primitive_root(q);
            if (E >= 2 && powmod(g, q - 1, q * q) == 1) g += q;
        }
    }

    u64 index() const { return q == 2 ? 0 : std::gcd(n, phi); }
    u64 size() const
    {
        if (q == 2) {
            if (n % 2) return phi;
            const int t = valuation(n, 2);
            return M >> std::min(E, t + 2);
        }
        return phi / index();
    }

    bool contains(u64 u) const
    {
        u %= M;
        if (u % q == 0) return false;
        if (q == 2) {
            if (n % 2) return true;
            const int t = valuation(n, 2);
            const u64 m = u64{1} << std::min(E, t + 2);
            return u % m == 1;
        }
        return powmod(u, phi / index(), M) == 1;
    }

    std::vector<u64> elements() const
    {
        std::vector<u64> out;
        if (q == 2) {
            for (u64 u = 1; u < M; u += 2)
                if (contains(u)) out.push_back(u);
            return out;
        }
        const u64 h = powmod(g, index(), M);
        u64 t = 1;
        for (u64 j = 0; j < size(); ++j) {
            out.push_back(t);
            t = mulmod(t, h, M);
        }
        return out;
    }
};

u64 pow_u(u64 q, i64 d)
{
    u64 r = 1;
    for (i64 i = 0; i < d; ++i) r *= q;
    return r;
}

class Solver {
public:
    Solver(const PrimeMap& A, const PrimeMap& B, const PrimeMap& C, u64 n1, u64 n2, u64 q, u64 cap)
        : q_(q), n1_(n1), n2_(n2), cap_(cap)
    {
        E_ = std::max(power_precision(q, n1), power_precision(q, n2));
        M_ = pow_u(q, E_);
        al_ = A.v(q), be_ = B.v(q), ga_ = C.v(q);
        A1_ = A.unit_part_mod(q, M_);
        B1_ = B.unit_part_mod(q, M_);
        C1_ = C.unit_part_mod(q, M_);
        Ainv_ = invmod(A1_, M_);
        Binv_ = invmod(B1_, M_);
    }

    int E() const { return E_; }
    i64 gamma() const { return ga_; }
    bool gave_up() const { return gave_up_; }

    bool soluble()
    {
        const UnitPowers U(q_, n1_, E_), W(q_, n2_, E_);
        const u64 negC_B = mulmod(M_ - C1_ % M_, Binv_, M_);
        const u64 C_A = mulmod(C1_, Ainv_, M_);
        // one side vanishes
        if (ga_ >= be_ && (ga_ - be_) % static_cast<i64>(n2_) == 0 && W.contains(negC_B)) return true;
        if (ga_ >= al_ && (ga_ - al_) % static_cast<i64>(n1_) == 0 && U.contains(C_A)) return true;
        const i64 N1 = static_cast<i64>(n1_), N2 = static_cast<i64>(n2_);

        // v(A rho^n1) = gamma < v(B tau^n2): A1 u = C1 + q^d B1 w
        if (ga_ >= al_ && (ga_ - al_) % N1 == 0) {
            i64 t = be_;
            while (t <= ga_) t += N2;
            for (; t - ga_ < E_; t += N2)
                if (exists(U, W, C1_, mulmod(pow_u(q_, t - ga_), B1_, M_), Ainv_)) return true;
        }
        // v(B tau^n2) = gamma < v(A rho^n1): B1 w = q^d A1 u - C1
        if (ga_ >= be_ && (ga_ - be_) % N2 == 0) {
            i64 s = al_;
            while (s <= ga_) s += N1;
            for (; s - ga_ < E_; s += N1)
                if (exists(W, U, M_ - C1_ % M_, mulmod(pow_u(q_, s - ga_), A1_, M_), Binv_)) return true;
        }
        // equal valuations s = t <= gamma: A1 u = B1 w + q^d C1
        for (i64 s = al_; s <= ga_; s += N1) {
            if (s < be_ || (s - be_) % N2 != 0) continue;
            const i64 d = ga_ - s;
            const u64 c = d >= E_ ? 0 : mulmod(pow_u(q_, d), C1_, M_);
            if (exists(U, W, c, B1_, Ainv_)) return true;
        }
        return false;
    }

private:
    // Is there w in Y with (c + k w) * inv in X?
    bool exists(const UnitPowers& X, const UnitPowers& Y, u64 c, u64 k, u64 inv)
    {
        c %= M_;
        k %= M_;
        if (k == 0) return X.contains(mulmod(c, inv, M_));
        if (c == 0 && k % q_ != 0 && q_ != 2) {
            // the products form a coset of the subgroup X Y
            const u64 j = std::gcd(X.index(), Y.index());
            return powmod(mulmod(k, inv, M_), X.phi / j, M_) == 1;
        }
        if (Y.size() > cap_) {
            gave_up_ = true;
            return false;
        }
        for (u64 w : Y.elements())
            if (X.contains(mulmod((c + mulmod(k, w, M_)) % M_, inv, M_))) return true;
        return false;
    }

    u64 q_, n1_, n2_, cap_;
    int E_ = 1;
    u64 M_ = 1;
    i64 al_ = 0, be_ = 0, ga_ = 0;
    u64 A1_ = 1, B1_ = 1, C1_ = 1, Ainv_ = 1, Binv_ = 1;
    bool gave_up_ = false;
};

}  // namespace

LocalCertificate padic_soluble(const PrimeMap& A, const PrimeMap& B, const PrimeMap& C, u64 n1, u64 n2, u64 q,
                               u64 enum_cap)
{
    if (!is_prime(q)) throw std::invalid_argument("padic_soluble: q must be prime");
    if (n1 == 0 || n2 == 0) throw std::invalid_argument("padic_soluble: exponents must be positive");
    LocalCertificate out;
    out.q = q;
    Solver s(A, B, C, n1, n2, q, enum_cap);
    if (s.soluble()) out.status = Solubility::soluble;
    else if (s.gave_up()) out.status = Solubility::unknown;
    else {
        out.status = Solubility::insoluble;
        out.e = static_cast<int>(s.gamma()) + s.E();
    }
    return out;
}

LocalCertificate locally_soluble(const CoprimeForm& f, u64 p, u64 q, const LocalOptions& opt)
{
    if (opt.sigma_degree == 0) throw std::invalid_argument("locally_soluble: sigma_degree must be positive");
    return padic_soluble(f.A, f.B, f.C, p, opt.sigma_degree * p, q, opt.enum_cap);
}

LocalOutcome local_test(const PrimeMap& a, const PrimeMap& b, const PrimeMap& c, u64 p, const LocalTestOptions& opt)
{
    LocalOutcome out;
    const Reduction red = reduce_coprime(a, b, c, p);
    if (red.contradiction) {
        out.eliminated = true;
        out.reason = "reduction";
        out.q = red.witness_prime;
        return out;
    }
    const CoprimeForm& f = red.form;
    if (auto q = qr_obstruction(f)) {
        out.eliminated = true;
        out.reason = "quadratic-residue";
        out.q = *q;
        out.e = 1;
        return out;
    }
    std::set<u64> qs;
    for (auto* m : {&f.A, &f.B, &f.C})
        for (u64 l : m->primes()) qs.insert(l);
    for (u64 l : primes_up_to(opt.small_prime_bound)) qs.insert(l);
    if (opt.include_p) qs.insert(p);
    LocalOptions lo;
    lo.sigma_degree = opt.sigma_degree;
    lo.enum_cap = opt.enum_cap;
    for (u64 q : qs) {
        out.tested.push_back(q);
        const LocalCertificate cert = locally_soluble(f, p, q, lo);
        if (cert.status == Solubility::insoluble) {
            out.eliminated = true;
            out.reason = "local";
            out.q = q;
            out.e = cert.e;
            return out;
        }
    }
    return out;
}

LocalOutcome local_test(const TernaryInstance& inst, const LocalTestOptions& opt)
{
    PrimeMap c = PrimeMap::of(inst.c0);
    for (const auto& f : factor(inst.r).factors) c.mul(f.prime, 2 * f.exp);
    return local_test(PrimeMap::of(inst.a, inst.p), PrimeMap::of(inst.b, inst.p), c, inst.p, opt);
}

}  // namespace apsieve
