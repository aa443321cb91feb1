#include <doctest.h>

#include <random>

#include "apsieve/quadfield.hpp"
#include "oracles.hpp"

using namespace apsieve;

TEST_SUITE("quadfield")
{
    TEST_CASE("class group examples")
    {
        CHECK(class_group(3).h == 1);
        CHECK(class_group(1).h == 1);
        CHECK(class_group(5).h == 2);
        CHECK(class_group(5).cyclic_factors == std::vector<u64>{2});
        CHECK(class_group(21).cyclic_factors == std::vector<u64>{2, 2});
        CHECK(class_group(47).h == 5);
        CHECK_THROWS(class_group(12));
    }

    TEST_CASE("class numbers against reduced-form enumeration, squarefree m <= 2000")
    {
        for (u64 m = 1; m <= 2000; ++m) {
            if (!oracle::squarefree(m)) continue;
            const i64 D = m % 4 == 3 ? -static_cast<i64>(m) : -4 * static_cast<i64>(m);
            const ClassGroup G = class_group(m);
            REQUIRE_MESSAGE(G.h == oracle::class_number_by_forms(D), "m = " << m);
            u64 prod = 1;
            for (u64 d : G.cyclic_factors) prod *= d;
            CHECK(prod == G.h);
            for (size_t i = 0; i < G.generators.size(); ++i)
                CHECK(form_pow(G.generators[i], G.cyclic_factors[i], D) == identity_form(D));
        }
    }

    TEST_CASE("larger discriminants")
    {
        for (u64 m : {100003ULL, 1000003ULL, 1234567ULL}) {
            if (!oracle::squarefree(m)) continue;
            const i64 D = m % 4 == 3 ? -static_cast<i64>(m) : -4 * static_cast<i64>(m);
            CHECK(class_number(m) == oracle::class_number_by_forms(D));
        }
    }

    TEST_CASE("split_type examples")
    {
        const QuadraticField K = make_field(3);
        const PrimeIdeal P7 = split_type(K, 7);
        CHECK(P7.kind == PrimeKind::split);
        CHECK(P7.root == 2);
        CHECK(split_type(K, 3).kind == PrimeKind::ramified);
        CHECK(split_type(K, 5).kind == PrimeKind::inert);
    }

    TEST_CASE("split_type trichotomy matches jacobi")
    {
        std::mt19937_64 rng(7);
        const auto qs = primes_up_to(3000);
        for (int i = 0; i < 1000; ++i) {
            u64 m;
            do m = 1 + rng() % 5000;
            while (!oracle::squarefree(m));
            const QuadraticField K = make_field(m);
            const u64 q = qs[1 + rng() % (qs.size() - 1)];
            const PrimeIdeal P = split_type(K, q);
            const int j = jacobi(-static_cast<i64>(m), q);
            const PrimeKind expect = j == 0 ? PrimeKind::ramified : j == 1 ? PrimeKind::split : PrimeKind::inert;
            REQUIRE(P.kind == expect);
            if (P.kind == PrimeKind::split) {
                CHECK((P.root * P.root + m) % q == 0);
                CHECK(P.root < q - P.root);
                const auto above = primes_above(K, q);
                REQUIRE(above.size() == 2);
                CHECK(above[1].root == q - P.root);
            }
        }
    }

    TEST_CASE("valuation examples")
    {
        const QuadraticField K = make_field(3);
        const FieldElement s = make_element(K, 0, 1);
        CHECK(valuation(K, s, split_type(K, 3)) == 1);
        const PrimeIdeal P7 = split_type(K, 7);
        const FieldElement e = make_element(K, 2, 1);
        CHECK(valuation(K, e, P7) + valuation(K, e, conjugate(P7)) == 1);
        CHECK(valuation(K, mpz_class(7), P7) == 1);
        CHECK(valuation(K, mpz_class(7), conjugate(P7)) == 1);
        CHECK_THROWS(valuation(K, FieldElement{}, P7));
    }

    TEST_CASE("residue_at_split examples")
    {
        const QuadraticField K = make_field(3);
        const PrimeIdeal P7 = split_type(K, 7);
        CHECK(residue_at_split(K, make_element(K, 0, 1), P7) == 2);
        CHECK(residue_at_split(K, make_element(K, 5, 0), P7) == 5);
        CHECK(residue_at_split(K, make_element(K, 1, 1), P7) == 3);
        CHECK_THROWS(residue_at_split(K, make_element(K, 1, 0), split_type(K, 5)));
    }

    TEST_CASE("residues are multiplicative and valuations additive")
    {
        std::mt19937_64 rng(17);
        const auto qs = primes_up_to(500);
        int checked = 0;
        while (checked < 1000) {
            const u64 m = std::vector<u64>{1, 2, 3, 5, 6, 7, 11, 15, 19, 23, 31, 43}[rng() % 12];
            const QuadraticField K = make_field(m);
            const u64 q = qs[1 + rng() % (qs.size() - 1)];
            const PrimeIdeal P = split_type(K, q);
            if (P.kind != PrimeKind::split) continue;
            auto rnd = [&] {
                const unsigned den = K.half_integral() && rng() % 2 ? 2 : 1;
                mpz_class x = static_cast<long>(rng() % 2001) - 1000, y = static_cast<long>(rng() % 2001) - 1000;
                if (den == 2 && (x - y) % 2 != 0) x += 1;
                return make_element(K, x, y, den);
            };
            const FieldElement e = rnd(), f = rnd();
            if (e.is_zero() || f.is_zero()) continue;
            const FieldElement ef = mul(K, e, f);
            REQUIRE(valuation(K, ef, P) == valuation(K, e, P) + valuation(K, f, P));
            CHECK(valuation(K, e, P) + valuation(K, e, conjugate(P)) == valuation(norm(K, e), q));
            if (norm(K, e) % q != 0 && norm(K, f) % q != 0)
                REQUIRE(residue_at_split(K, ef, P) == residue_at_split(K, e, P) * residue_at_split(K, f, P) % q);
            ++checked;
        }
    }

    TEST_CASE("element arithmetic")
    {
        const QuadraticField K = make_field(3);
        const FieldElement g = make_element(K, 1, 2);
        const FieldElement g5 = pow(K, g, 5);
        CHECK(g5 == make_element(K, 601, 58));  // (1 + 2s)^5 with s^2 = -3
        CHECK(norm(K, g5) == 13 * 13 * 13 * 13 * 13);
        CHECK(conj(g) == make_element(K, 1, -2));
        const FieldElement h = make_element(K, 1, 3, 2);
        CHECK(norm(K, h) == 7);
        CHECK_THROWS(make_element(K, 1, 2, 2));
    }

    TEST_CASE("principal generators")
    {
        const QuadraticField K = make_field(5);
        const auto P3 = split_type(K, 3);
        CHECK_FALSE(principal_generator(K, ideal_of(K, P3)).has_value());
        const auto g = principal_generator(K, ideal_pow(K, ideal_of(K, P3), 2));
        REQUIRE(g.has_value());
        CHECK(abs(norm(K, *g)) == 9);
        CHECK(valuation(K, *g, P3) == 2);
    }
}
