#include "apsieve/bounds.hpp"

#include <map>
#include <sstream>

#include <mpfr.h>

namespace apsieve {

namespace {

constexpr mpfr_prec_t kPrec = 160;

struct Mp {
    mpfr_t v;
    Mp() { mpfr_init2(v, kPrec); }
    ~Mp() { mpfr_clear(v); }
    Mp(const Mp&) = delete;
    Mp& operator=(const Mp&) = delete;
};

u64 ipow(u64 b, i64 e)
{
    u64 r = 1;
    for (i64 i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace

std::string NormalizedForm::describe() const
{
    std::ostringstream os;
    os << "|" << a0 << "*" << (a0_on_u ? "U" : "V") << "^p - " << b0 << "*" << (a0_on_u ? "V" : "U")
       << "^p| = " << c_mult << "*r^2, U = " << u_scale << "*w2, V = " << v_scale << "*w1^2 (multiplier "
       << multiplier << ")";
    return os.str();
}

NormalizedForm normalize(const CaseTemplate& t)
{
    if (t.branch != Branch::sieve) throw std::invalid_argument("normalize: case is not a sieve case");
    // minimal multiplier clearing every negative constant exponent
    std::map<u64, std::pair<i64, i64>> ea, eb;  // prime -> (alpha, beta)
    for (const auto& f : t.a.factors) ea[f.prime] = {f.alpha, f.beta};
    for (const auto& f : t.b.factors) eb[f.prime] = {f.alpha, f.beta};
    std::map<u64, i64> mu;
    for (auto& [l, e] : ea) mu[l] = std::max<i64>(mu[l], -e.first);
    for (auto& [l, e] : eb) mu[l] = std::max<i64>(mu[l], -e.first);
    NormalizedForm f;
    f.case_id = t.id;
    u64 ca = 1, cb = 1;
    for (auto& [l, m] : mu) {
        f.multiplier *= ipow(l, m);
        const auto a = ea.count(l) ? ea[l] : std::pair<i64, i64>{0, 0};
        const auto b = eb.count(l) ? eb[l] : std::pair<i64, i64>{0, 0};
        ca *= ipow(l, a.first + m);
        cb *= ipow(l, b.first + m);
        f.u_scale *= ipow(l, a.second);
        // b carries l^(beta p) w1^(2p) = (l^beta w1^2)^p
        f.v_scale *= ipow(l, b.second);
    }
    f.c_mult = t.c0 * f.multiplier;
    f.a0_on_u = ca >= cb;
    f.a0 = std::max(ca, cb);
    f.b0 = std::min(ca, cb);
    return f;
}

MignotteTerms mignotte_terms(const NormalizedForm& f, const std::string& r_max)
{
    if (f.a0 == f.b0) throw std::invalid_argument("mignotte_bound: a0 == b0");
    Mp r, t1, t2, la, lab, tmp;
    if (mpfr_set_str(r.v, r_max.c_str(), 10, MPFR_RNDU) != 0 && mpfr_nan_p(r.v))
        throw std::invalid_argument("mignotte_bound: bad r_max");
    if (mpfr_sgn(r.v) <= 0) throw std::invalid_argument("mignotte_bound: r_max must be positive");

    // term1 = 3 log(1.5 * c_mult * r^2 / b0), rounded up
    mpfr_sqr(t1.v, r.v, MPFR_RNDU);
    mpfr_mul_ui(t1.v, t1.v, f.c_mult, MPFR_RNDU);
    mpfr_mul_d(t1.v, t1.v, 1.5, MPFR_RNDU);
    mpfr_div_ui(t1.v, t1.v, f.b0, MPFR_RNDU);
    mpfr_log(t1.v, t1.v, MPFR_RNDU);
    mpfr_mul_ui(t1.v, t1.v, 3, MPFR_RNDU);

    // term2 = 7400 log A / log(1 + log A / log(a0/b0)): numerator up, denominator down
    const u64 A = std::max<u64>({f.a0, f.b0, 3});
    mpfr_set_ui(la.v, A, MPFR_RNDN);
    mpfr_log(la.v, la.v, MPFR_RNDU);
    mpfr_set_ui(lab.v, f.a0, MPFR_RNDN);
    mpfr_div_ui(lab.v, lab.v, f.b0, MPFR_RNDU);
    mpfr_log(lab.v, lab.v, MPFR_RNDU);
    mpfr_set_ui(tmp.v, A, MPFR_RNDN);
    mpfr_log(tmp.v, tmp.v, MPFR_RNDD);
    mpfr_div(tmp.v, tmp.v, lab.v, MPFR_RNDD);
    mpfr_add_ui(tmp.v, tmp.v, 1, MPFR_RNDD);
    mpfr_log(tmp.v, tmp.v, MPFR_RNDD);
    mpfr_mul_ui(t2.v, la.v, 7400, MPFR_RNDU);
    mpfr_div(t2.v, t2.v, tmp.v, MPFR_RNDU);

    MignotteTerms out;
    out.term1 = mpfr_get_d(t1.v, MPFR_RNDU);
    out.term2 = mpfr_get_d(t2.v, MPFR_RNDU);
    out.value = std::max(out.term1, out.term2);
    return out;
}

u64 mignotte_bound(const NormalizedForm& f, const std::string& r_max)
{
    const MignotteTerms t = mignotte_terms(f, r_max);
    // nearest integer, halves up; never below the floor, which is what an integer p must satisfy
    return static_cast<u64>(t.value + 0.5);
}

u64 mignotte_bound(const NormalizedForm& f, u64 r_max) { return mignotte_bound(f, std::to_string(r_max)); }

}  // namespace apsieve
