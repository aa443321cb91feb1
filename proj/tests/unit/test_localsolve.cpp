#include <doctest.h>

#include <numeric>
#include <random>

#include "apsieve/localsolve.hpp"
#include "oracles.hpp"

using namespace apsieve;

namespace {

bool pairwise_coprime(const CoprimeForm& f)
{
    for (u64 l : f.A.primes())
        if (f.B.divisible_by(l) || f.C.divisible_by(l)) return false;
    for (u64 l : f.B.primes())
        if (f.C.divisible_by(l)) return false;
    return true;
}

CoprimeForm form(u64 A, u64 B, u64 C)
{
    return reduce_coprime(A, B, C, 5).form;
}

}  // namespace

TEST_SUITE("localsolve")
{
    TEST_CASE("reduce_coprime examples")
    {
        const Reduction r1 = reduce_coprime(2401, 1, 12, 5);
        CHECK_FALSE(r1.contradiction);
        CHECK(r1.form.A.value() == 2401);
        CHECK(r1.form.B.value() == 1);
        CHECK(r1.form.C.value() == 12);
        CHECK(r1.form.reduction_trace.empty());

        // 12 rho^5 - 5 sigma^10 = 9 forces 3 | sigma, then 3 | rho, then a 3-adic clash
        const Reduction r2 = reduce_coprime(12, 5, 9, 5);
        CHECK(r2.contradiction);
        CHECK(r2.witness_prime == 3);

        const Reduction r3 = reduce_coprime(5, 2, 6, 5);
        CHECK_FALSE(r3.contradiction);
        CHECK(r3.form.A.value() == 80);
        CHECK(r3.form.B.value() == 1);
        CHECK(r3.form.C.value() == 3);
        CHECK(pairwise_coprime(r3.form));

        CHECK_THROWS(reduce_coprime(6, 10, 14, 5));
    }

    TEST_CASE("reduction output is pairwise coprime and the trace replays")
    {
        std::mt19937_64 rng(8);
        int done = 0;
        while (done < 2000) {
            const u64 a = rng() % 5000 + 1, b = rng() % 5000 + 1, c = rng() % 5000 + 1;
            if (std::gcd(std::gcd(a, b), c) != 1) continue;
            const u64 p = std::vector<u64>{5, 7, 11}[rng() % 3];
            const Reduction r = reduce_coprime(a, b, c, p);
            const Reduction again = replay_trace(PrimeMap::of(a), PrimeMap::of(b), PrimeMap::of(c), p,
                                                 r.form.reduction_trace);
            if (!r.contradiction) {
                REQUIRE(pairwise_coprime(r.form));
                CHECK(again.form.A == r.form.A);
                CHECK(again.form.B == r.form.B);
                CHECK(again.form.C == r.form.C);
                CHECK_FALSE(again.contradiction);
            } else {
                CHECK(r.form.A.divisible_by(r.witness_prime));
                CHECK(r.form.B.divisible_by(r.witness_prime));
                CHECK_FALSE(r.form.C.divisible_by(r.witness_prime));
            }
            ++done;
        }
    }

    TEST_CASE("qr_necessary")
    {
        CHECK(qr_necessary(form(7, 1, 12)));
        CHECK_FALSE(qr_necessary(form(5, 1, 3)));
        CHECK(qr_obstruction(form(5, 1, 3)) == 5u);
        CHECK(qr_necessary(form(1, 13, 17)));
        CHECK(qr_necessary(form(1, 2, 3)));
    }

    TEST_CASE("locally_soluble examples")
    {
        const LocalCertificate c1 = locally_soluble(form(5, 1, 3), 5, 5);
        CHECK(c1.status == Solubility::insoluble);
        CHECK(c1.q == 5);
        CHECK(c1.e >= 1);
        CHECK(locally_soluble(form(7, 1, 12), 5, 7).status == Solubility::soluble);
        CHECK(std::string(solubility_name(Solubility::unknown)) == "unknown");
        CHECK_THROWS(padic_soluble(PrimeMap::of(1), PrimeMap::of(1), PrimeMap::of(1), 5, 10, 9));
    }

    TEST_CASE("insoluble certificates hold under enumeration modulo q^e")
    {
        std::mt19937_64 rng(12);
        int insoluble = 0, soluble = 0;
        const u64 qs[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 31, 41};
        for (int i = 0; i < 4000; ++i) {
            const u64 q = qs[rng() % 11];
            const u64 n1 = std::vector<u64>{5, 7, 11}[rng() % 3];
            const u64 n2 = n1 * (1 + rng() % 2);
            const u64 A = rng() % 400 + 1, B = rng() % 400 + 1, C = rng() % 400 + 1;
            const LocalCertificate cert =
                padic_soluble(PrimeMap::of(A), PrimeMap::of(B), PrimeMap::of(C), n1, n2, q);
            if (cert.status == Solubility::insoluble) {
                CHECK(cert.q == q);
                u64 M = 1;
                for (int k = 0; k < cert.e; ++k) M *= q;
                if (M > 1000000) continue;
                REQUIRE_MESSAGE(!oracle::mixed_power_solution_mod(A, B, C, n1, n2, M),
                                A << " " << B << " " << C << " n=" << n1 << "," << n2 << " q^e=" << M);
                ++insoluble;
            } else if (cert.status == Solubility::soluble) {
                // a q-adic solution reduces to a solution modulo every q^e
                u64 M = q;
                while (M * q <= 20000) M *= q;
                REQUIRE(oracle::mixed_power_solution_mod(A, B, C, n1, n2, M));
                ++soluble;
            }
        }
        CHECK(insoluble > 100);
        CHECK(soluble > 100);
    }

    TEST_CASE("local_test on instances")
    {
        // case 1, p = 7, r = 1 reaches the local stage only if the sieve spared it; check the API either way
        const auto inst = instantiate(case_template(1), 7, 5);
        const LocalOutcome o = local_test(inst);
        if (o.eliminated) {
            CHECK_FALSE(o.reason.empty());
            CHECK(o.q > 0);
        } else {
            CHECK(std::find(o.tested.begin(), o.tested.end(), 7u) != o.tested.end());
            CHECK(std::find(o.tested.begin(), o.tested.end(), 19u) != o.tested.end());
        }
    }

    TEST_CASE("constructed solutions are never eliminated")
    {
        std::mt19937_64 rng(41);
        int tested = 0;
        while (tested < 1000) {
            const u64 p = std::vector<u64>{5, 7}[rng() % 2];
            const u64 a = rng() % 200 + 1, b = rng() % 200 + 1;
            const long w1 = static_cast<long>(rng() % 6) + 1, w2 = static_cast<long>(rng() % 12) + 1;
            const mpz_class c = a * oracle::ipow(w2, p) - b * oracle::ipow(w1, 2 * p);
            if (c <= 0 || c > mpz_class(static_cast<unsigned long>(kFactorLimit))) continue;
            if (std::gcd(std::gcd(a, b), c.get_ui()) != 1) continue;
            for (unsigned deg : {1u, 2u}) {
                LocalTestOptions opt;
                opt.sigma_degree = deg;
                const LocalOutcome o = local_test(PrimeMap::of(a), PrimeMap::of(b), PrimeMap::of(c.get_ui()), p, opt);
                REQUIRE_MESSAGE(!o.eliminated, a << " " << b << " " << c << " p=" << p << " by " << o.reason << " q="
                                                 << o.q);
            }
            ++tested;
        }
    }
}
