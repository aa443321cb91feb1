#include <doctest.h>

#include <random>

#include "apsieve/cases.hpp"
#include "oracles.hpp"

using namespace apsieve;

TEST_SUITE("cases")
{
    TEST_CASE("twelve templates")
    {
        const auto& T = build_case_templates();
        REQUIRE(T.size() == 12);
        int even = 0;
        for (size_t i = 0; i < T.size(); ++i) {
            CHECK(T[i].id == static_cast<int>(i) + 1);
            const std::vector<u64> allowed{12, 4, 3, 1, 6, 2};
            CHECK(std::find(allowed.begin(), allowed.end(), T[i].c0) != allowed.end());
            if (T[i].branch == Branch::even_contradiction) ++even;
        }
        CHECK(even == 4);
        for (int id : {5, 6, 11, 12}) CHECK(case_template(id).branch == Branch::even_contradiction);
        for (int id : {7, 8, 9, 10}) CHECK(case_template(id).branch == Branch::lehmer);
        CHECK_THROWS(case_template(13));
    }

    TEST_CASE("template coefficients")
    {
        const auto& t1 = case_template(1);
        CHECK(t1.a.eval(5) == 2401);
        CHECK(t1.b.eval(5) == 1);
        CHECK(t1.c0 == 12);
        // case 10: x = 2^(p-2) 3^(p-1) 7^(p-1) w1^p
        for (u64 p : {5, 7, 11}) {
            const mpz_class e = oracle::ipow(2, p - 2) * oracle::ipow(3, p - 1) * oracle::ipow(7, p - 1);
            CHECK(case_template(10).x_coef.eval(p) == e);
        }
    }

    TEST_CASE("instantiate")
    {
        const auto i1 = instantiate(case_template(1), 7, 1);
        CHECK(i1.a_value() == 117649);
        CHECK(i1.b_value() == 1);
        CHECK(i1.c == 12);
        const auto i4 = instantiate(case_template(4), 5, 2);
        CHECK(i4.a_value() == 2401);
        CHECK(i4.b_value() == 16 * 2187);
        CHECK(i4.c == 4);
        const auto i3 = instantiate(case_template(3), 5, 1);
        CHECK(i3.a_value() == 2401);
        CHECK(i3.b_value() == 16);
        CHECK(i3.c == 3);
        CHECK_THROWS(instantiate(case_template(1), 3, 1));
        CHECK_THROWS(instantiate(case_template(1), 9, 1));
        CHECK_THROWS(instantiate(case_template(1), 5, 0));
        CHECK_THROWS(instantiate(case_template(1), 5, kRMax + 1));
        CHECK_THROWS(instantiate(case_template(7), 5, 1));
    }

    TEST_CASE("even cases")
    {
        for (int id : {5, 6, 11, 12}) {
            const auto cert = eliminate_even_case(case_template(id));
            CHECK(cert.case_id == id);
            CHECK(cert.v2_c_side >= 1);
            CHECK(cert.v2_c_side <= 2);
            CHECK_FALSE(cert.statement.empty());
            for (u64 p = 5; p < 2000; p = next_prime(p)) REQUIRE(cert.verify(p));
        }
        CHECK(eliminate_even_case(case_template(5)).v2_c_side == 1);
        CHECK(eliminate_even_case(case_template(6)).v2_c_side == 1);
        CHECK_THROWS_AS(eliminate_even_case(case_template(1)), std::invalid_argument);
    }

    TEST_CASE("even cases: the 2-adic pattern has no small solution")
    {
        // brute force a w2^p - b w1^(2p) = c0 r^2 modulo 2^(big) for r odd and the case parity of x
        for (int id : {5, 6, 11, 12}) {
            const auto& t = case_template(id);
            const u64 p = 5;
            const mpz_class a = t.a.eval(p), b = t.b.eval(p);
            for (long w1 = -20; w1 <= 20; ++w1)
                for (long w2 = -20; w2 <= 20; ++w2) {
                    const mpz_class lhs = a * oracle::ipow(w2, p) - b * oracle::ipow(w1, 2 * p);
                    if (lhs <= 0 || lhs % t.c0 != 0) continue;
                    const mpz_class r2 = lhs / t.c0;
                    if (!is_square(r2)) continue;
                    mpz_class r = sqrt(r2);
                    if (r % 2 == 0) continue;
                    const mpz_class x = t.x_coef.eval(p) * oracle::ipow(w1, p);
                    FAIL("case " << id << ": w1 = " << w1 << ", w2 = " << w2 << ", x = " << x);
                }
        }
    }

    TEST_CASE("descent equations give 7 x (x^2 + 12 r^2) = y^p with y = 7 k w1 w2")
    {
        std::mt19937_64 rng(2);
        for (const auto& t : build_case_templates()) {
            for (u64 p : {5, 7, 11, 13}) {
                // 7 x (x^2 + 12 r^2) = 7 x_coef rhs_coef (w1 w2)^p, which must be (7 k)^p (w1 w2)^p
                const mpz_class lhs = 7 * t.x_coef.eval(p) * t.rhs_coef.eval(p);
                CHECK(lhs == oracle::ipow(7 * t.y_factor, p));
                for (int i = 0; i < 20; ++i) {
                    const long w1 = static_cast<long>(rng() % 50) + 1, w2 = static_cast<long>(rng() % 50) + 1;
                    const mpz_class x = t.x_coef.eval(p) * oracle::ipow(w1, p);
                    const mpz_class rhs = t.rhs_coef.eval(p) * oracle::ipow(w2, p);
                    // the ternary equation is 12 * (a w2^p - b w1^2p) = c0 * (x^2 + 12 r^2 - x^2)
                    const mpz_class tern = t.a.eval(p) * oracle::ipow(w2, p) - t.b.eval(p) * oracle::ipow(w1, 2 * p);
                    CHECK(12 * tern == t.c0 * (rhs - x * x));
                }
            }
        }
    }

    TEST_CASE("seven cube sum identity")
    {
        std::mt19937_64 rng(1);
        for (int i = 0; i < 1000; ++i) {
            const mpz_class x = static_cast<long>(rng() % 2000001) - 1000000;
            const mpz_class r = static_cast<long>(rng() % 1000000) + 1;
            REQUIRE(seven_cube_sum(x, r) == 7 * x * (x * x + 12 * r * r));
        }
    }

    TEST_CASE("gcd(x, x^2 + 12 r^2) divides 12")
    {
        std::mt19937_64 rng(4);
        const std::vector<u64> allowed{1, 2, 3, 4, 6, 12};
        for (int i = 0; i < 10000; ++i) {
            const u64 x = rng() % 1000000 + 1, r = rng() % 1000000 + 1;
            if (gcd(x, r) != 1) continue;
            mpz_class X = static_cast<unsigned long>(x);
            mpz_class s = X * X + 12 * mpz_class(static_cast<unsigned long>(r)) * r;
            mpz_class g = gcd(X, s);
            REQUIRE(std::find(allowed.begin(), allowed.end(), g.get_ui()) != allowed.end());
        }
    }

    TEST_CASE("case membership of x partitions the integers")
    {
        for (long x = 1; x <= 5000; ++x) {
            int hits = 0;
            for (const auto& t : build_case_templates()) hits += t.x_matches(x);
            // x odd with 3 | x and 7 !| x etc.: exactly one case
            REQUIRE(hits == 1);
        }
    }
}
