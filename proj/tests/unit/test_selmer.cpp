#include <doctest.h>

#include <random>
#include <set>

#include "apsieve/germain.hpp"
#include "apsieve/selmer.hpp"
#include "oracles.hpp"

using namespace apsieve;

namespace {

CoprimeForm raw_form(u64 A, u64 B, u64 C)
{
    CoprimeForm f;
    f.A = PrimeMap::of(A);
    f.B = PrimeMap::of(B);
    f.C = PrimeMap::of(C);
    return f;
}

// p-rank of Cl / <classes of S>, by enumerating the whole group.
size_t quotient_p_rank(u64 m, const std::vector<PrimeIdeal>& S, u64 p)
{
    const QuadraticField K = make_field(m);
    const auto T = class_group_table(m);
    const i64 D = T->disc();
    const u64 h = T->group().h;
    std::set<std::pair<i64, i64>> H{{identity_form(D).a, identity_form(D).b}};
    std::vector<Form> frontier{identity_form(D)};
    std::vector<Form> gens;
    for (const auto& P : S) gens.push_back(ideal_class(K, ideal_of(K, P)));
    while (!frontier.empty()) {
        std::vector<Form> next;
        for (const Form& f : frontier)
            for (const Form& g : gens) {
                const Form x = compose(f, g, D);
                if (H.insert({x.a, x.b}).second) next.push_back(x);
            }
        frontier = std::move(next);
    }
    u64 count = 0;
    for (u64 i = 0; i < h; ++i) {
        const Form g = T->element(T->coords_of(i));
        const Form gp = form_pow(g, p, D);
        count += H.count({gp.a, gp.b});
    }
    const u64 ratio = count / H.size();
    size_t r = 0;
    for (u64 x = 1; x < ratio; x *= p) ++r;
    return r;
}

}  // namespace

TEST_SUITE("selmer")
{
    TEST_CASE("descent_data examples")
    {
        const DescentData d1 = descent_data(raw_form(1, 1, 3));
        CHECK(d1.B_prime.value() == 1);
        CHECK(d1.v.value() == 1);
        CHECK(d1.u.value() == 1);
        CHECK(d1.m == 3);
        CHECK(d1.n.value() == 1);
        const DescentData d2 = descent_data(raw_form(5, 2, 6));
        CHECK(d2.B_prime.value() == 2);
        CHECK(d2.v.value() == 2);
        CHECK(d2.u.value() == 10);
        CHECK(d2.m == 3);
        CHECK(d2.n.value() == 2);
        const DescentData d3 = descent_data(raw_form(7, 9, 5));
        CHECK(d3.B_prime.value() == 1);
        CHECK(d3.v.value() == 3);
        CHECK(d3.u.value() == 7);
        CHECK(d3.m == 5);
        CHECK(d3.n.value() == 1);
    }

    TEST_CASE("descent_data invariants")
    {
        std::mt19937_64 rng(2);
        for (int i = 0; i < 500; ++i) {
            const u64 A = rng() % 10000 + 1, B = rng() % 10000 + 1, C = rng() % 10000 + 1;
            const DescentData d = descent_data(raw_form(A, B, C));
            CHECK(B * d.B_prime.value() == d.v.value() * d.v.value());
            CHECK(d.u.value() == A * d.B_prime.value());
            CHECK(C * d.B_prime.value() == d.m * d.n.value() * d.n.value());
            CHECK(oracle::squarefree(d.m));
        }
    }

    TEST_CASE("selmer_group examples")
    {
        const QuadraticField K3 = make_field(3);
        CHECK(selmer_group(K3, {}, 5).dim() == 0);
        const PrimeIdeal P7 = split_type(K3, 7);
        const SelmerGroup G = selmer_group(K3, {P7}, 5);
        REQUIRE(G.dim() == 1);
        const FieldElement g = G.basis[0].value;
        // a generator of q7 up to p-th powers and units, e.g. (1 + 3 sqrt(-3)) / 2 of norm 7
        CHECK(valuation(K3, g, P7) % 5 != 0);
        CHECK(valuation(K3, g, conjugate(P7)) % 5 == 0);
        const mpz_class N = norm(K3, g);
        CHECK(valuation(N, 7) % 5 == valuation(K3, g, P7) % 5);
        CHECK(selmer_group(make_field(5), {}, 5).dim() == 0);
        CHECK(selmer_group(make_field(47), {}, 5).dim() == 1);  // h = 5
        CHECK_THROWS(selmer_group(K3, {}, 3));
    }

    TEST_CASE("dimension formula and valuations outside S")
    {
        std::mt19937_64 rng(6);
        int done = 0;
        while (done < 200) {
            const u64 m = rng() % 100000 + 1;
            if (!oracle::squarefree(m)) continue;
            const QuadraticField K = make_field(m);
            const u64 p = std::vector<u64>{5, 7, 11}[rng() % 3];
            std::vector<PrimeIdeal> S;
            const size_t want = rng() % 4;
            for (u64 l = 2; S.size() < want && l < 200; l = next_prime(l)) {
                if (rng() % 3) continue;
                for (const auto& P : primes_above(K, l))
                    if (P.kind != PrimeKind::inert && S.size() < want) S.push_back(P);
            }
            const SelmerGroup G = selmer_group(K, S, p);
            CHECK(G.unit_rank == S.size());
            REQUIRE_MESSAGE(G.class_rank == quotient_p_rank(m, S, p), "m = " << m << " p = " << p);
            CHECK(G.dim() == S.size() + G.class_rank);
            for (const auto& b : G.basis) {
                const mpz_class N = abs(norm(K, b.value)) * b.value.den * b.value.den;
                mpz_class rest = N;
                for (u64 l = 2; rest > 1 && l < 100000; l = next_prime(l)) {
                    if (rest % l != 0) continue;
                    while (rest % l == 0) rest /= l;
                    for (const auto& P : primes_above(K, l))
                        if (G.index_of(P) == S.size()) CHECK(valuation(K, b.value, P) % static_cast<int>(p) == 0);
                }
            }
            ++done;
        }
    }

    TEST_CASE("epsilon_set examples")
    {
        const QuadraticField K3 = make_field(3);
        const SelmerGroup G0 = selmer_group(K3, {}, 5);
        const EpsilonSet e0 = epsilon_set(G0, PrimeMap::of(1));
        REQUIRE(e0.coords.size() == 1);
        CHECK(e0.coords[0].empty());
        const SelmerGroup G7 = selmer_group(K3, {split_type(K3, 7)}, 5);
        const EpsilonSet e7 = epsilon_set(G7, PrimeMap::of(7));
        REQUIRE(e7.coords.size() == 1);
        const FieldElement eps = materialize(G7, e7.coords[0]);
        CHECK(exact_root(norm(K3, eps) / 7, 5).has_value());
        // 11 is inert in Q(sqrt(-3)): nothing has norm 11 times a fifth power
        CHECK(epsilon_set(G0, PrimeMap::of(11)).coords.empty());
    }

    TEST_CASE("lemma_valuative")
    {
        LocalOrders o;
        o.v = 0, o.n_sqrt = 1, o.eps = 2;
        CHECK(lemma_valuative(o, 5) == 1);
        LocalOrders o2;
        o2.v = 0, o2.n_sqrt = 1, o2.eps = 6;
        CHECK(lemma_valuative(o2, 5) == 0);
        // 2v, eps, eps_bar pairwise distinct: condition (ii)
        LocalOrders o3;
        o3.v = 0, o3.n_sqrt = 0, o3.eps = 1, o3.eps_bar = 2, o3.two_v = 0, o3.two_n_sqrt = 1;
        CHECK(lemma_valuative(o3, 5) == 2);
        // ramified prime above 3 in Q(sqrt(-3)): v = 1, n = 1, eps = 1 gives orders 0, 1, 0
        const QuadraticField K3 = make_field(3);
        CHECK(lemma_valuative(K3, make_element(K3, 1, 0), 1, 1, split_type(K3, 3), 5) == 0);
        CHECK(lemma_valuative(K3, make_element(K3, 9, 0), 1, 1, split_type(K3, 3), 5) == 1);
    }

    TEST_CASE("chi set size")
    {
        for (u64 p : {5, 7, 11, 13})
            for (u64 k = 1; k < 40; ++k) {
                const u64 q = 2 * k * p + 1;
                if (oracle::prime(q)) CHECK(chi_set(p, q).size() == 2 * k + 1);
            }
    }

    TEST_CASE("constructed descents survive every lemma")
    {
        std::mt19937_64 rng(77);
        int done = 0;
        const u64 ms[] = {1, 2, 3, 5, 6, 7, 11, 19, 23, 47};
        while (done < 300) {
            const u64 p = std::vector<u64>{5, 7}[rng() % 2];
            const QuadraticField K = make_field(ms[rng() % 10]);
            auto r = [&](int b) { return mpz_class(static_cast<long>(rng() % (2 * b + 1)) - b); };
            const FieldElement eps0 = make_element(K, r(20), r(20)), eta = make_element(K, r(6), r(6));
            if (eps0.is_zero() || eta.is_zero()) continue;
            const long sigma = std::vector<long>{1, 2, 3, 5, -1, 7}[rng() % 6];
            const mpz_class sp = oracle::ipow(sigma, p);
            const FieldElement z = mul(K, eps0, pow(K, eta, p));
            const mpz_class v = z.x, n = z.y * sp;
            if (v == 0 || n == 0 || z.den != 1) continue;
            // v sigma^p + n sqrt(-m) = eps eta^p with eps = eps0 sigma^p
            const FieldElement eps = mul(K, eps0, make_element(K, sp, 0));
            for (u64 l : {2, 3, 5, 7, 11, 13})
                for (const auto& P : primes_above(K, l))
                    REQUIRE(lemma_valuative(K, eps, v, n, P, p) == 0);
            for (u64 k = 1; k < 60; ++k) {
                const u64 q = 2 * k * p + 1;
                if (!is_prime(q)) continue;
                const auto Ps = primes_above(K, q);
                if (Ps.size() != 2 || valuation(K, eps, Ps[0]) || valuation(K, eps, Ps[1])) continue;
                REQUIRE_FALSE(lemma_cpq(K, eps, v, n, p, q));
            }
            for (u64 l : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31})
                REQUIRE_MESSAGE(!local_descent_kills(K, eps, v, n, l, p),
                                "m=" << K.m << " l=" << l << " v=" << v << " n=" << n);
            ++done;
        }
    }

    TEST_CASE("descent_test on small forms")
    {
        const auto red = reduce_coprime(7, 1, 12, 7);
        const DescentOutcome o = descent_test(red.form, 7);
        CHECK(o.m == 3);
        CHECK(o.reason != "");
        if (o.eliminated) CHECK(o.killed_valuative + o.killed_cpq == o.epsilon_count);
        CHECK_THROWS(DescentEngine(4));
    }
}
