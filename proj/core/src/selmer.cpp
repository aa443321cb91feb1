#include "apsieve/selmer.hpp"

#include <algorithm>
#include <limits>
#include <tuple>
#include <set>
#include <sstream>

#include "apsieve/germain.hpp"

namespace apsieve {

namespace {

using Row = std::vector<mpz_class>;

// Integer row echelon on columns [c0, c1); returns the rank. Pivots are made positive.
size_t echelon(std::vector<Row>& rows, size_t c0, size_t c1)
{
    size_t rank = 0;
    for (size_t c = c0; c < c1 && rank < rows.size(); ++c) {
        for (;;) {
            size_t best = rows.size();
            for (size_t i = rank; i < rows.size(); ++i)
                if (rows[i][c] != 0 && (best == rows.size() || abs(rows[i][c]) < abs(rows[best][c]))) best = i;
            if (best == rows.size()) break;
            std::swap(rows[rank], rows[best]);
            bool done = true;
            for (size_t i = rank + 1; i < rows.size(); ++i) {
                if (rows[i][c] == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[rank][c].get_mpz_t());
                for (size_t j = 0; j < rows[i].size(); ++j) rows[i][j] -= q * rows[rank][j];
                if (rows[i][c] != 0) done = false;
            }
            if (done) break;
        }
        if (rank < rows.size() && rows[rank][c] != 0) {
            if (rows[rank][c] < 0)
                for (auto& x : rows[rank]) x = -x;
            ++rank;
        }
    }
    return rank;
}

// Hermite normal form basis of the lattice spanned by rows (full column rank n assumed).
std::vector<Row> hnf_basis(std::vector<Row> rows, size_t n)
{
    const size_t rank = echelon(rows, 0, n);
    if (rank != n) throw std::logic_error("hnf_basis: lattice not of full rank");
    rows.resize(n);
    for (size_t k = 0; k < n; ++k) {
        // pivot of row k is at column k (upper triangular)
        for (size_t i = 0; i < k; ++i) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), rows[i][k].get_mpz_t(), rows[k][k].get_mpz_t());
            if (q != 0)
                for (size_t j = 0; j < n; ++j) rows[i][j] -= q * rows[k][j];
        }
    }
    return rows;
}

u64 modp(i64 x, u64 p) { return mod_signed(x, p); }

bool pairwise_distinct(i64 a, i64 b, i64 c, u64 p)
{
    const u64 x = modp(a, p), y = modp(b, p), z = modp(c, p);
    return x != y && y != z && x != z;
}

// (ord, unit residue) of e in the completion at a split odd prime, uniformizer q.
std::pair<i64, u64> split_unit_residue(const QuadraticField& K, const FieldElement& e, const PrimeIdeal& P)
{
    const u64 q = P.q;
    const mpz_class nn = norm(K, e);
    const int prec = valuation(nn, q) + 2;
    const mpz_class S = padic_root(K, P, prec);
    mpz_class mod;
    mpz_ui_pow_ui(mod.get_mpz_t(), q, prec);
    mpz_class t = e.x + e.y * S;
    if (e.den == 2) {
        mpz_class inv, two = 2;
        mpz_invert(inv.get_mpz_t(), two.get_mpz_t(), mod.get_mpz_t());
        t *= inv;
    }
    t %= mod;
    if (t < 0) t += mod;
    i64 a = 0;
    while (t != 0 && mpz_divisible_ui_p(t.get_mpz_t(), q)) t /= static_cast<unsigned long>(q), ++a;
    return {a, mpz_fdiv_ui(t.get_mpz_t(), q)};
}

int ord_rational(const PrimeMap& x, const PrimeIdeal& P) { return P.ramification() * static_cast<int>(x.v(P.q)); }

// Solve M x = t over F_p: particular solution and kernel basis, or nothing.
bool solve_fp(std::vector<std::vector<u64>> M, std::vector<u64> t, size_t n, u64 p, std::vector<u64>& x0,
              std::vector<std::vector<u64>>& kernel)
{
    const size_t rows = M.size();
    std::vector<size_t> pivcol;
    size_t r = 0;
    for (size_t c = 0; c < n && r < rows; ++c) {
        size_t piv = rows;
        for (size_t i = r; i < rows; ++i)
            if (M[i][c] % p) {
                piv = i;
                break;
            }
        if (piv == rows) continue;
        std::swap(M[r], M[piv]);
        std::swap(t[r], t[piv]);
        const u64 inv = invmod(M[r][c] % p, p);
        for (auto& v : M[r]) v = mulmod(v, inv, p);
        t[r] = mulmod(t[r], inv, p);
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || M[i][c] % p == 0) continue;
            const u64 f = M[i][c] % p;
            for (size_t j = 0; j < n; ++j) M[i][j] = (M[i][j] + p - mulmod(f, M[r][j], p)) % p;
            t[i] = (t[i] + p - mulmod(f, t[r], p)) % p;
        }
        pivcol.push_back(c);
        ++r;
    }
    for (size_t i = r; i < rows; ++i)
        if (t[i] % p) return false;
    x0.assign(n, 0);
    for (size_t i = 0; i < r; ++i) x0[pivcol[i]] = t[i];
    std::vector<bool> is_piv(n, false);
    for (size_t c : pivcol) is_piv[c] = true;
    kernel.clear();
    for (size_t f = 0; f < n; ++f) {
        if (is_piv[f]) continue;
        std::vector<u64> k(n, 0);
        k[f] = 1;
        for (size_t i = 0; i < r; ++i) k[pivcol[i]] = (p - M[i][f] % p) % p;
        kernel.push_back(std::move(k));
    }
    return true;
}

}  // namespace

DescentData descent_data(const CoprimeForm& f)
{
    DescentData d;
    for (auto& [l, k] : f.B.e) {
        if (k % 2) d.B_prime.mul(l, 1);
        d.v.mul(l, (k + k % 2) / 2);
    }
    d.u = f.A * d.B_prime;
    const PrimeMap cb = f.C * d.B_prime;
    mpz_class m = 1;
    for (auto& [l, k] : cb.e) {
        if (k % 2) m *= static_cast<unsigned long>(l);
        if (k / 2) d.n.mul(l, k / 2);
    }
    if (!m.fits_ulong_p()) throw std::out_of_range("descent_data: m too large");
    d.m = m.get_ui();
    return d;
}

std::vector<PrimeIdeal> selmer_primes(const QuadraticField& K, const DescentData& d)
{
    std::set<u64> ls{2};
    for (u64 l : d.u.primes()) ls.insert(l);
    for (u64 l : d.n.primes()) ls.insert(l);
    for (const auto& f : factor(d.m).factors) ls.insert(f.prime);
    std::vector<PrimeIdeal> S;
    for (u64 l : ls)
        for (const auto& P : primes_above(K, l)) S.push_back(P);
    return S;
}

size_t SelmerGroup::index_of(const PrimeIdeal& P) const
{
    for (size_t i = 0; i < S.size(); ++i)
        if (S[i] == P) return i;
    return S.size();
}

SelmerGroup selmer_group(const QuadraticField& K, const std::vector<PrimeIdeal>& S, u64 p)
{
    if (p < 5 || !is_prime(p)) throw std::invalid_argument("selmer_group: p must be a prime >= 5");
    SelmerGroup G;
    G.K = K;
    G.S = S;
    G.p = p;
    G.unit_rank = S.size();
    const size_t n = S.size();
    auto table = class_group_table(K.m);
    const auto& d = table->group().cyclic_factors;
    const size_t r = d.size();

    std::vector<Ideal> ideals;
    std::vector<std::vector<u64>> cls;
    for (const auto& P : S) {
        ideals.push_back(ideal_of(K, P));
        cls.push_back(table->dlog(ideal_class(K, ideals.back())));
    }

    auto generator_of = [&](const Ideal& I) {
        auto g = principal_generator(K, I);
        if (!g) throw std::logic_error("selmer_group: expected a principal ideal");
        return *g;
    };

    // S-unit part: lattice of exponent vectors with principal product
    if (n) {
        std::vector<Row> basis;
        if (r == 0) {
            for (size_t i = 0; i < n; ++i) {
                Row e(n, 0);
                e[i] = 1;
                basis.push_back(e);
            }
        } else {
            std::vector<Row> rows;
            for (size_t i = 0; i < n + r; ++i) {
                Row row(r + n, 0);
                if (i < n) {
                    for (size_t j = 0; j < r; ++j) row[j] = static_cast<unsigned long>(cls[i][j]);
                    row[r + i] = 1;
                } else {
                    row[i - n] = static_cast<unsigned long>(d[i - n]);
                }
                rows.push_back(std::move(row));
            }
            const size_t rank = echelon(rows, 0, r);
            std::vector<Row> ker;
            for (size_t i = rank; i < rows.size(); ++i) ker.emplace_back(rows[i].begin() + r, rows[i].end());
            basis = hnf_basis(std::move(ker), n);
        }
        for (const Row& e : basis) {
            Ideal I = unit_ideal(K);
            SelmerBasisElement b;
            for (size_t i = 0; i < n; ++i) {
                if (e[i] < 0) throw std::logic_error("selmer_group: negative exponent in HNF basis");
                if (e[i] != 0) I = ideal_mul(K, I, ideal_pow(K, ideals[i], e[i].get_ui()));
                b.s_orders.push_back(mpz_fdiv_ui(e[i].get_mpz_t(), p));
            }
            b.value = generator_of(I);
            G.basis.push_back(std::move(b));
        }
    }

    // class group p-torsion of Cl / <S>
    const u64 h = table->group().h;
    if (h % p == 0) {
        auto add = [&](const std::vector<u64>& a, const std::vector<u64>& b, u64 k) {
            std::vector<u64> c(r);
            for (size_t j = 0; j < r; ++j) c[j] = (a[j] + (b[j] % d[j]) * (k % d[j])) % d[j];
            return c;
        };
        std::vector<std::vector<u64>> neg(n);
        for (size_t i = 0; i < n; ++i) {
            neg[i].resize(r);
            for (size_t j = 0; j < r; ++j) neg[i][j] = (d[j] - cls[i][j] % d[j]) % d[j];
        }
        // breadth first over H = <S> using the negated classes; parent links give exponent vectors
        std::vector<i64> parent(h, -2);
        std::vector<int> via(h, -1);
        std::vector<u64> queue{0};
        parent[0] = -1;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            const auto c = table->coords_of(queue[qi]);
            for (size_t i = 0; i < n; ++i) {
                const u64 idx = table->index_of(add(c, neg[i], 1));
                if (parent[idx] != -2) continue;
                parent[idx] = static_cast<i64>(queue[qi]);
                via[idx] = static_cast<int>(i);
                queue.push_back(idx);
            }
        }
        std::vector<bool> T(h, false);
        for (u64 x : queue) T[x] = true;
        const std::vector<u64> zero(r, 0);
        for (u64 x = 0; x < h; ++x) {
            if (T[x]) continue;
            const auto cx = table->coords_of(x);
            if (parent[table->index_of(add(zero, cx, p))] == -2) continue;
            // representative ideal and its actual class
            const Ideal B = ideal_from_form(table->element(cx));
            const auto cb = table->dlog(ideal_class(K, B));
            const u64 px = table->index_of(add(zero, cb, p));
            if (parent[px] == -2) throw std::logic_error("selmer_group: inconsistent class representative");
            std::vector<u64> f(n, 0);
            for (u64 y = px; parent[y] != -1; y = static_cast<u64>(parent[y])) ++f[via[y]];
            Ideal I = ideal_pow(K, B, p);
            SelmerBasisElement b;
            b.from_class_group = true;
            for (size_t i = 0; i < n; ++i) {
                if (f[i]) I = ideal_mul(K, I, ideal_pow(K, ideals[i], f[i]));
                b.s_orders.push_back(f[i] % p);
            }
            b.value = generator_of(I);
            G.basis.push_back(std::move(b));
            ++G.class_rank;
            // T <- T + <cb>
            std::vector<u64> members;
            for (u64 y = 0; y < h; ++y)
                if (T[y]) members.push_back(y);
            for (u64 y : members) {
                const auto cy = table->coords_of(y);
                for (u64 j = 1; j < p; ++j) T[table->index_of(add(cy, cb, j))] = true;
            }
        }
    }
    if (G.basis.size() != G.unit_rank + G.class_rank) throw std::logic_error("selmer_group: dimension mismatch");
    return G;
}

std::vector<u64> s_orders(const SelmerGroup& G, const std::vector<u64>& coords)
{
    std::vector<u64> o(G.S.size(), 0);
    for (size_t i = 0; i < G.basis.size(); ++i)
        for (size_t j = 0; j < o.size(); ++j) o[j] = (o[j] + mulmod(coords[i], G.basis[i].s_orders[j], G.p)) % G.p;
    return o;
}

FieldElement materialize(const SelmerGroup& G, const std::vector<u64>& coords)
{
    FieldElement e = make_element(G.K, 1, 0);
    for (size_t i = 0; i < G.basis.size(); ++i)
        if (coords[i]) e = mul(G.K, e, pow(G.K, G.basis[i].value, coords[i]));
    return e;
}

EpsilonSet epsilon_set(const SelmerGroup& G, const PrimeMap& u, unsigned max_free_dim)
{
    EpsilonSet out;
    const u64 p = G.p;
    const size_t dim = G.basis.size();
    std::set<u64> below;
    for (const auto& P : G.S) below.insert(P.q);
    for (u64 l : u.primes())
        if (!below.count(l) && u.v(l) % static_cast<i64>(p)) return out;
    std::vector<std::vector<u64>> M;
    std::vector<u64> t;
    for (u64 l : below) {
        std::vector<u64> row(dim, 0);
        for (size_t j = 0; j < G.S.size(); ++j) {
            if (G.S[j].q != l) continue;
            const u64 f = static_cast<u64>(G.S[j].residue_degree());
            for (size_t i = 0; i < dim; ++i) row[i] = (row[i] + f * G.basis[i].s_orders[j]) % p;
        }
        M.push_back(std::move(row));
        t.push_back(modp(u.v(l), p));
    }
    std::vector<u64> x0;
    std::vector<std::vector<u64>> ker;
    if (!solve_fp(M, t, dim, p, x0, ker)) return out;
    out.free_dim = ker.size();
    if (out.free_dim > max_free_dim) {
        out.aborted = true;
        std::ostringstream os;
        os << "epsilon enumeration needs p^" << out.free_dim << " candidates (limit p^" << max_free_dim << ")";
        out.diagnostic = os.str();
        return out;
    }
    std::vector<u64> tcoef(ker.size(), 0);
    for (;;) {
        std::vector<u64> x = x0;
        for (size_t j = 0; j < ker.size(); ++j)
            for (size_t i = 0; i < dim; ++i) x[i] = (x[i] + tcoef[j] * ker[j][i]) % p;
        out.coords.push_back(std::move(x));
        size_t j = 0;
        while (j < tcoef.size() && ++tcoef[j] == p) tcoef[j++] = 0;
        if (j == tcoef.size()) break;
    }
    std::sort(out.coords.begin(), out.coords.end());
    return out;
}

int lemma_valuative(const LocalOrders& o, u64 p)
{
    if (pairwise_distinct(o.v, o.n_sqrt, o.eps, p)) return 1;
    if (pairwise_distinct(o.two_v, o.eps, o.eps_bar, p)) return 2;
    if (pairwise_distinct(o.two_n_sqrt, o.eps, o.eps_bar, p)) return 3;
    return 0;
}

int lemma_valuative(const QuadraticField& K, const FieldElement& eps, const mpz_class& v, const mpz_class& n,
                    const PrimeIdeal& P, u64 p)
{
    LocalOrders o;
    o.v = valuation(K, v, P);
    o.two_v = valuation(K, mpz_class(2 * v), P);
    o.n_sqrt = valuation(K, make_element(K, 0, n), P);
    o.two_n_sqrt = valuation(K, make_element(K, 0, 2 * n), P);
    o.eps = valuation(K, eps, P);
    o.eps_bar = valuation(K, conj(eps), P);
    return lemma_valuative(o, p);
}

bool cpq_empty(u64 q, u64 k, const std::vector<u64>& chi, u64 vq, u64 nq, u64 s1, u64 s2, u64 e1, u64 e2)
{
    const u64 E1 = powmod(e1, 2 * k, q), E2 = powmod(e2, 2 * k, q);
    const u64 n1 = mulmod(nq, s1, q), n2 = mulmod(nq, s2, q);
    for (u64 z : chi) {
        const u64 vz = mulmod(vq, z, q);
        const u64 t1 = powmod((vz + n1) % q, 2 * k, q);
        if (t1 != 0 && t1 != E1) continue;
        const u64 t2 = powmod((vz + n2) % q, 2 * k, q);
        if (t2 == 0 || t2 == E2) return false;
    }
    return true;
}

bool lemma_cpq(const QuadraticField& K, const FieldElement& eps, const mpz_class& v, const mpz_class& n, u64 p, u64 q)
{
    if (!is_prime(q) || (q - 1) % (2 * p) != 0) throw std::invalid_argument("lemma_cpq: q must be a prime 2kp+1");
    const auto Ps = primes_above(K, q);
    if (Ps.size() != 2) throw std::invalid_argument("lemma_cpq: q does not split");
    for (const auto& P : Ps)
        if (valuation(K, eps, P) != 0) throw std::invalid_argument("lemma_cpq: eps is not a unit above q");
    const FieldElement s = make_element(K, 0, 1);
    return cpq_empty(q, (q - 1) / (2 * p), chi_set(p, q), mpz_fdiv_ui(v.get_mpz_t(), q), mpz_fdiv_ui(n.get_mpz_t(), q),
                     residue_at_split(K, s, Ps[0]), residue_at_split(K, s, Ps[1]), residue_at_split(K, eps, Ps[0]),
                     residue_at_split(K, eps, Ps[1]));
}

DescentEngine::DescentEngine(u64 p, u64 k_max_selmer, unsigned max_free_dim)
    : p_(p), k_max_(k_max_selmer), max_free_dim_(max_free_dim)
{
    if (p < 5 || !is_prime(p)) throw std::invalid_argument("DescentEngine: p must be a prime >= 5");
    for (u64 k = 1; k <= k_max_; ++k) {
        const u64 q = 2 * k * p + 1;
        if (is_prime(q)) aux_.push_back({q, k, chi_set(p, q)});
    }
}

const std::vector<DescentEngine::Root>& DescentEngine::roots_for(u64 m)
{
    auto it = roots_.find(m);
    if (it != roots_.end()) return it->second;
    std::vector<Root> rs;
    for (const auto& a : aux_) {
        Root r;
        if (m % a.q != 0 && jacobi(-static_cast<i64>(m % a.q), a.q) == 1) {
            r.split = true;
            r.s = *sqrt_mod(-static_cast<i64>(m % a.q), a.q);
        }
        rs.push_back(r);
    }
    return roots_.emplace(m, std::move(rs)).first->second;
}

DescentOutcome DescentEngine::run(const CoprimeForm& f)
{
    DescentOutcome out;
    const u64 p = p_;
    const DescentData dd = descent_data(f);
    out.m = dd.m;
    const QuadraticField K = make_field(dd.m);
    SelmerGroup G;
    try {
        G = selmer_group(K, selmer_primes(K, dd), p);
    } catch (const std::length_error& e) {
        out.reason = "guard";
        out.diagnostic = e.what();
        return out;
    }
    out.selmer_dim = G.dim();
    const EpsilonSet E = epsilon_set(G, dd.u, max_free_dim_);
    if (E.aborted) {
        out.reason = "guard";
        out.diagnostic = E.diagnostic;
        return out;
    }
    out.epsilon_count = E.coords.size();
    if (E.coords.empty()) {
        out.eliminated = true;
        out.reason = "empty-epsilon";
        return out;
    }

    // valuative conditions at primes above 2 u v n m
    struct Site {
        size_t s_idx, bar_idx;
        LocalOrders base;
    };
    std::vector<Site> sites;
    {
        std::set<u64> ls{2};
        for (const PrimeMap* x : {&dd.u, &dd.v, &dd.n})
            for (u64 l : x->primes()) ls.insert(l);
        for (const auto& fct : factor(dd.m).factors) ls.insert(fct.prime);
        for (u64 l : ls)
            for (const auto& P : primes_above(K, l)) {
                Site s;
                s.s_idx = G.index_of(P);
                s.bar_idx = G.index_of(conjugate(P));
                const int sq = dd.m % l == 0 ? 1 : 0;
                s.base.v = ord_rational(dd.v, P);
                s.base.two_v = s.base.v + (l == 2 ? P.ramification() : 0);
                s.base.n_sqrt = ord_rational(dd.n, P) + sq;
                s.base.two_n_sqrt = s.base.n_sqrt + (l == 2 ? P.ramification() : 0);
                sites.push_back(s);
            }
    }

    // C(p, q) data, filled lazily per auxiliary prime
    const auto& roots = roots_for(dd.m);
    std::vector<mpz_class> norms;
    for (const auto& b : G.basis) norms.push_back(norm(K, b.value));
    struct AuxRes {
        bool ready = false, usable = false;
        u64 vq = 0, nq = 0;
        std::vector<u64> r1, r2;  // unit residues of basis elements above q
        std::vector<i64> a1, a2;  // their orders
    };
    std::vector<AuxRes> ares(aux_.size());
    auto prepare = [&](size_t i) {
        AuxRes& a = ares[i];
        a.ready = true;
        const u64 q = aux_[i].q;
        if (!roots[i].split) return;
        a.usable = true;
        a.vq = dd.v.mod(q);
        a.nq = dd.n.mod(q);
        const u64 s = roots[i].s, inv2 = (q + 1) / 2;
        const PrimeIdeal P1 = split_type(K, q), P2 = conjugate(P1);
        for (size_t j = 0; j < G.basis.size(); ++j) {
            const FieldElement& b = G.basis[j].value;
            if (!mpz_divisible_ui_p(norms[j].get_mpz_t(), q)) {
                const u64 x = mpz_fdiv_ui(b.x.get_mpz_t(), q), y = mpz_fdiv_ui(b.y.get_mpz_t(), q);
                u64 e1 = (x + mulmod(y, s, q)) % q, e2 = (x + mulmod(y, q - s, q)) % q;
                if (b.den == 2) e1 = mulmod(e1, inv2, q), e2 = mulmod(e2, inv2, q);
                a.r1.push_back(e1), a.r2.push_back(e2);
                a.a1.push_back(0), a.a2.push_back(0);
                continue;
            }
            // q itself serves as uniformizer in both completions
            for (int side = 0; side < 2; ++side) {
                const auto [ord, res] = split_unit_residue(K, b, side ? P2 : P1);
                (side ? a.r2 : a.r1).push_back(res);
                (side ? a.a2 : a.a1).push_back(ord);
            }
        }
    };

    std::set<u64> used_q;
    for (const auto& x : E.coords) {
        const auto so = s_orders(G, x);
        bool killed = false;
        for (const Site& s : sites) {
            LocalOrders o = s.base;
            o.eps = s.s_idx < so.size() ? static_cast<i64>(so[s.s_idx]) : 0;
            o.eps_bar = s.bar_idx < so.size() ? static_cast<i64>(so[s.bar_idx]) : 0;
            if (lemma_valuative(o, p)) {
                killed = true;
                break;
            }
        }
        if (killed) {
            ++out.killed_valuative;
            continue;
        }
        for (size_t i = 0; i < aux_.size() && !killed; ++i) {
            if (!ares[i].ready) prepare(i);
            const AuxRes& a = ares[i];
            if (!a.usable) continue;
            const u64 q = aux_[i].q;
            // a representative with order 0 above q exists only if both orders vanish mod p
            i64 A1 = 0, A2 = 0;
            for (size_t j = 0; j < x.size(); ++j) {
                A1 += static_cast<i64>(x[j]) * a.a1[j];
                A2 += static_cast<i64>(x[j]) * a.a2[j];
            }
            if (A1 % static_cast<i64>(p) || A2 % static_cast<i64>(p)) continue;
            u64 e1 = 1, e2 = 1;
            for (size_t j = 0; j < x.size(); ++j)
                if (x[j]) {
                    e1 = mulmod(e1, powmod(a.r1[j], x[j], q), q);
                    e2 = mulmod(e2, powmod(a.r2[j], x[j], q), q);
                }
            if (cpq_empty(q, aux_[i].k, aux_[i].chi, a.vq, a.nq, roots[i].s, q - roots[i].s, e1, e2)) {
                killed = true;
                used_q.insert(q);
            }
        }
        if (killed) {
            ++out.killed_cpq;
            continue;
        }
        if (local_bound_) {
            const FieldElement eps = materialize(G, x);
            const mpz_class vv = dd.v.value(), nn = dd.n.value();
            for (u64 l = 2; l <= local_bound_ && !killed; l = next_prime(l))
                killed = local_descent_kills(K, eps, vv, nn, l, p);
            if (killed) {
                ++out.killed_local;
                continue;
            }
        }
        out.surviving.push_back(x);
    }
    out.cpq_primes.assign(used_q.begin(), used_q.end());
    if (out.surviving.empty()) {
        out.eliminated = true;
        out.reason = "all-epsilon-killed";
    } else {
        out.reason = "survives";
    }
    return out;
}

namespace {

// (A + B s) / D with s^2 = -m and D > 0.
struct Frac {
    mpz_class A, B, D;
};

struct PadicStatus {
    bool known = false;
    i64 ord = 0;
    bool pth = false;
};

constexpr int kLocalPrec = 64;

i64 vl(const mpz_class& x, u64 l)
{
    if (x == 0) return std::numeric_limits<i64>::max() / 4;
    return valuation(x, l);
}

mpz_class pow_ui(u64 b, u64 e)
{
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), b, e);
    return r;
}

mpz_class strip(const mpz_class& x, u64 l, i64 k)
{
    mpz_class d = pow_ui(l, static_cast<u64>(k));
    return x / d;
}

// (u0 + u1 t)^e in (Z / mod)[t], t^2 = t0 + t1 t.
std::pair<mpz_class, mpz_class> qpow(mpz_class u0, mpz_class u1, mpz_class e, const mpz_class& mod,
                                     const mpz_class& t0, const mpz_class& t1)
{
    mpz_class r0 = 1, r1 = 0;
    auto mulq = [&](const mpz_class& a0, const mpz_class& a1, const mpz_class& b0, const mpz_class& b1) {
        mpz_class c0 = a0 * b0, c1 = a0 * b1 + a1 * b0, c2 = a1 * b1;
        mpz_class x0 = c0 + c2 * t0, x1 = c1 + c2 * t1;
        mpz_fdiv_r(x0.get_mpz_t(), x0.get_mpz_t(), mod.get_mpz_t());
        mpz_fdiv_r(x1.get_mpz_t(), x1.get_mpz_t(), mod.get_mpz_t());
        return std::pair(x0, x1);
    };
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) std::tie(r0, r1) = mulq(r0, r1, u0, u1);
        std::tie(u0, u1) = mulq(u0, u1, u0, u1);
        e /= 2;
    }
    return {r0, r1};
}

mpz_class modp(const mpz_class& x, const mpz_class& m)
{
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
    return r;
}

PadicStatus padic_status(const QuadraticField& K, PrimeKind kind, u64 l, u64 p, const Frac& x,
                         const mpz_class& root)
{
    PadicStatus st;
    const u64 m = K.m;
    if (kind == PrimeKind::split) {
        const mpz_class mod = pow_ui(l, kLocalPrec);
        mpz_class z = modp(x.A + x.B * root, mod);
        const i64 vz = vl(z, l), vd = vl(x.D, l);
        if (vz >= kLocalPrec - 4) return st;
        st.ord = vz - vd;
        const mpz_class m2 = pow_ui(l, 2);
        mpz_class d = modp(strip(x.D, l, vd), m2), zu = modp(strip(z, l, vz), m2);
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), d.get_mpz_t(), m2.get_mpz_t());
        mpz_class u = modp(zu * inv, m2);
        bool unit_ok;
        if (l != p) {
            u64 g = gcd(p, l - 1);
            unit_ok = powmod(mpz_fdiv_ui(u.get_mpz_t(), l), (l - 1) / g, l) == 1;
        } else {
            mpz_class w;
            mpz_powm_ui(w.get_mpz_t(), u.get_mpz_t(), p - 1, m2.get_mpz_t());
            unit_ok = w == 1;
        }
        st.known = true;
        st.pth = st.ord % static_cast<i64>(p) == 0 && unit_ok;
        return st;
    }
    if (kind == PrimeKind::inert) {
        mpz_class a, b, t0, t1;
        if (l == 2) {
            // s = 2w - 1, w^2 = w - (1 + m)/4
            a = x.A - x.B, b = 2 * x.B;
            t0 = -mpz_class(static_cast<unsigned long>((m + 1) / 4)), t1 = 1;
        } else {
            a = x.A, b = x.B;
            t0 = -mpz_class(static_cast<unsigned long>(m)), t1 = 0;
        }
        const i64 k = std::min(vl(a, l), vl(b, l)), vd = vl(x.D, l);
        st.ord = k - vd;
        a = strip(a, l, k), b = strip(b, l, k);
        const mpz_class mod = l == p ? pow_ui(l, 2) : mpz_class(static_cast<unsigned long>(l));
        mpz_class d = modp(strip(x.D, l, vd), mod), inv;
        mpz_invert(inv.get_mpz_t(), d.get_mpz_t(), mod.get_mpz_t());
        const u64 N = l * l;
        mpz_class e = l == p ? mpz_class(static_cast<unsigned long>(N - 1))
                             : mpz_class(static_cast<unsigned long>((N - 1) / gcd(p, N - 1)));
        auto [r0, r1] = qpow(modp(a * inv, mod), modp(b * inv, mod), e, mod, modp(t0, mod), modp(t1, mod));
        st.known = true;
        st.pth = st.ord % static_cast<i64>(p) == 0 && r0 == 1 && r1 == 0;
        return st;
    }
    if (l == 2 || l == p) return st;
    // ramified odd l: uniformizer s, s^2 = -m
    const i64 va = vl(x.A, l), vb = vl(x.B, l), vd = vl(x.D, l);
    st.ord = std::min(2 * va, 2 * vb + 1) - 2 * vd;
    st.known = true;
    const u64 g = gcd(p, l - 1);
    if (st.ord % static_cast<i64>(p) != 0) return st;
    if (g == 1) {
        st.pth = true;
        return st;
    }
    // residue of x / s^ord
    mpz_class num = x.A, den = x.D;
    i64 o = st.ord;
    if (o & 1) num = -mpz_class(static_cast<unsigned long>(m)) * x.B, ++o;
    const mpz_class mm = -mpz_class(static_cast<unsigned long>(m));
    mpz_class mp;
    if (o >= 0) {
        mpz_pow_ui(mp.get_mpz_t(), mm.get_mpz_t(), static_cast<unsigned long>(o / 2));
        den *= mp;
    } else {
        mpz_pow_ui(mp.get_mpz_t(), mm.get_mpz_t(), static_cast<unsigned long>(-o / 2));
        num *= mp;
    }
    const u64 un = mpz_fdiv_ui(strip(num, l, vl(num, l)).get_mpz_t(), l);
    const u64 ud = mpz_fdiv_ui(strip(den, l, vl(den, l)).get_mpz_t(), l);
    const u64 u = mulmod(un, invmod(ud, l), l);
    st.pth = powmod(u, (l - 1) / g, l) == 1;
    return st;
}

}  // namespace

bool local_descent_kills(const QuadraticField& K, const FieldElement& eps, const mpz_class& v, const mpz_class& n,
                         u64 ell, u64 p, int max_depth)
{
    const PrimeIdeal P = split_type(K, ell);
    const PrimeKind kind = P.kind;
    if (kind == PrimeKind::ramified && (ell == 2 || ell == p)) return false;
    if (kind == PrimeKind::split && ell == 2) return false;
    if (v == 0 || eps.is_zero()) return false;

    std::vector<mpz_class> roots{0};
    if (kind == PrimeKind::split) {
        auto s0 = sqrt_mod(-static_cast<i64>(K.m), ell);
        if (!s0) return false;
        const mpz_class mod = pow_ui(ell, kLocalPrec);
        mpz_class s = static_cast<unsigned long>(*s0), mm = static_cast<unsigned long>(K.m);
        for (int it = 0; it < 8; ++it) {
            mpz_class f = s * s + mm, df = 2 * s, inv;
            mpz_invert(inv.get_mpz_t(), df.get_mpz_t(), mod.get_mpz_t());
            s = modp(s - f * inv, mod);
        }
        roots = {s, modp(-s, mod)};
    }
    const mpz_class X = eps.x, Y = eps.y, D = static_cast<unsigned long>(eps.den);
    const mpz_class Nn = X * X + mpz_class(static_cast<unsigned long>(K.m)) * Y * Y;
    const mpz_class mm = static_cast<unsigned long>(K.m);
    const i64 e = kind == PrimeKind::ramified ? 2 : 1;
    const i64 c = ell == p ? 2 : 1;
    const i64 vv = vl(v, ell);

    struct Cls {
        mpz_class s0;
        int k;
    };
    std::vector<Cls> stack;
    for (u64 s = 0; s < ell; ++s) stack.push_back({mpz_class(static_cast<unsigned long>(s)), 1});
    while (!stack.empty()) {
        Cls cl = stack.back();
        stack.pop_back();
        mpz_class sp;
        mpz_pow_ui(sp.get_mpz_t(), cl.s0.get_mpz_t(), p);
        const mpz_class z1 = v * sp;
        Frac Z{z1, n, 1};
        Frac x{D * (z1 * X + mm * n * Y), D * (n * X - z1 * Y), Nn};
        bool dead = false, all_pass = true;
        for (const auto& root : roots) {
            PadicStatus sx = padic_status(K, kind, ell, p, x, root);
            PadicStatus sz = padic_status(K, kind, ell, p, Z, root);
            if (!sx.known || !sz.known) return false;
            const bool det = e * (vv + cl.k) >= sz.ord + c * e;
            if (det && !sx.pth) {
                dead = true;
                break;
            }
            if (!(det && sx.pth)) all_pass = false;
        }
        if (dead) continue;
        if (all_pass) return false;
        if (cl.k >= max_depth) return false;
        const mpz_class step = pow_ui(ell, static_cast<u64>(cl.k));
        for (u64 j = 0; j < ell; ++j) stack.push_back({cl.s0 + step * static_cast<unsigned long>(j), cl.k + 1});
    }
    return true;
}

DescentOutcome descent_test(const CoprimeForm& f, u64 p, u64 k_max_selmer)
{
    DescentEngine e(p, k_max_selmer);
    return e.run(f);
}

}  // namespace apsieve
