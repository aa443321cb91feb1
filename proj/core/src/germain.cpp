#include "apsieve/germain.hpp"

#include <algorithm>

namespace apsieve {

namespace {

constexpr u64 kDirectQueries = 96;

void check_q(u64 p, u64 q)
{
    if (!is_prime(q)) throw std::invalid_argument("q must be prime");
    if ((q - 1) % (2 * p) != 0) throw std::invalid_argument("q must be 1 mod 2p");
}

std::vector<u64> power_set(u64 q, u64 step, u64 count)
{
    const u64 g = primitive_root(q);
    const u64 h = powmod(g, step, q);
    std::vector<u64> out{0};
    u64 t = 1;
    for (u64 j = 0; j < count; ++j) {
        out.push_back(t);
        t = mulmod(t, h, q);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// (x)^(2k) in {0, 1}
bool in_chi(u64 x, u64 k, u64 q) { return x == 0 || powmod(x, 2 * k, q) == 1; }

}  // namespace

std::vector<u64> mu_set(u64 p, u64 q)
{
    check_q(p, q);
    const u64 k = (q - 1) / (2 * p);
    return power_set(q, 2 * p, k);
}

std::vector<u64> chi_set(u64 p, u64 q)
{
    if (!is_prime(q) || (q - 1) % p != 0) throw std::invalid_argument("chi_set: q must be a prime 1 mod p");
    return power_set(q, p, (q - 1) / p);
}

bool b_set_is_empty(u64 a, u64 b, u64 c, u64 p, u64 q)
{
    check_q(p, q);
    a %= q, b %= q, c %= q;
    if (a == 0) throw std::invalid_argument("b_set_is_empty: q divides a");
    const u64 k = (q - 1) / (2 * p);
    const u64 ainv = invmod(a, q);
    for (u64 z : mu_set(p, q)) {
        const u64 t = mulmod((mulmod(b, z, q) + c) % q, ainv, q);
        if (in_chi(t, k, q)) return false;
    }
    return true;
}

bool b_set_is_empty(const mpz_class& a, const mpz_class& b, const mpz_class& c, u64 p, u64 q)
{
    return b_set_is_empty(mpz_fdiv_ui(a.get_mpz_t(), q), mpz_fdiv_ui(b.get_mpz_t(), q), mpz_fdiv_ui(c.get_mpz_t(), q),
                          p, q);
}

GermainSieve::GermainSieve(const FactoredInteger& a, const FactoredInteger& b, u64 p, u64 k_max) : p_(p), k_max_(k_max)
{
    if (p < 3 || !is_prime(p)) throw std::invalid_argument("GermainSieve: p must be an odd prime");
    for (u64 k = 1; k <= k_max; ++k) {
        const u64 q = 2 * k * p + 1;
        if (!is_prime(q)) continue;
        GermainContext c;
        c.p = p;
        c.q = q;
        c.k = k;
        c.a_mod = eval_mod(a, p, q);
        if (c.a_mod == 0) continue;
        c.b_mod = eval_mod(b, p, q);
        c.mu = mu_set(p, q);
        ctx_.push_back(std::move(c));
    }
    lazy_.resize(ctx_.size());
}

bool GermainSieve::eliminates(size_t i, u64 cmod)
{
    const GermainContext& c = ctx_[i];
    Lazy& L = lazy_[i];
    if (L.reachable.empty() && ++L.queries <= kDirectQueries) {
        const u64 ainv = invmod(c.a_mod, c.q);
        for (u64 z : c.mu)
            if (in_chi(mulmod((mulmod(c.b_mod, z, c.q) + cmod) % c.q, ainv, c.q), c.k, c.q)) return false;
        return true;
    }
    if (L.reachable.empty()) {
        // every c = a t - b z with t in chi, z in mu leaves B(p, q) nonempty
        L.chi = chi_set(p_, c.q);
        L.reachable.assign(c.q, false);
        for (u64 t : L.chi) {
            const u64 at = mulmod(c.a_mod, t, c.q);
            for (u64 z : c.mu) {
                const u64 bz = mulmod(c.b_mod, z, c.q);
                L.reachable[at >= bz ? at - bz : at + c.q - bz] = true;
            }
        }
    }
    return !L.reachable[cmod];
}

std::optional<u64> GermainSieve::eliminating_prime(const mpz_class& c)
{
    for (size_t i = 0; i < ctx_.size(); ++i)
        if (eliminates(i, mpz_fdiv_ui(c.get_mpz_t(), ctx_[i].q))) return ctx_[i].q;
    return std::nullopt;
}

std::optional<u64> GermainSieve::eliminating_prime(u64 c0, u64 r)
{
    for (size_t i = 0; i < ctx_.size(); ++i) {
        const u64 q = ctx_[i].q;
        const u64 rm = r % q;
        if (eliminates(i, mulmod(c0 % q, mulmod(rm, rm, q), q))) return q;
    }
    return std::nullopt;
}

std::optional<u64> find_eliminating_prime(const TernaryInstance& inst, u64 k_max)
{
    GermainSieve s(inst.a, inst.b, inst.p, k_max);
    return s.eliminating_prime(inst.c);
}

SieveResult sieve_range(GermainSieve& sieve, const CaseTemplate& t, u64 r_lo, u64 r_hi)
{
    SieveResult out;
    const auto excl = t.coprimality_primes();
    for (u64 r = r_lo; r <= r_hi; ++r) {
        bool skip = false;
        for (u64 l : excl)
            if (r % l == 0) {
                out.coprime.push_back({r, l});
                skip = true;
                break;
            }
        if (skip) continue;
        if (auto q = sieve.eliminating_prime(t.c0, r)) out.eliminated.push_back({r, *q});
        else out.survivors.push_back(r);
    }
    return out;
}

SieveResult sieve_range(int case_id, u64 p, u64 r_lo, u64 r_hi, u64 k_max)
{
    const CaseTemplate& t = case_template(case_id);
    if (t.branch != Branch::sieve) throw std::invalid_argument("sieve_range: not a sieve case");
    if (r_lo < 1 || r_hi > kRMax || r_lo > r_hi) throw std::out_of_range("sieve_range: bad r range");
    GermainSieve s(t.a, t.b, p, k_max);
    return sieve_range(s, t, r_lo, r_hi);
}

}  // namespace apsieve
