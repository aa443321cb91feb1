#pragma once

// Constructed-solution sweep shared by the unit suite and the acceptance binary.
// Each instance a w2^p - b w1^(2p) = c has the integer solution (w1, w2) by construction,
// so no stage may eliminate it.  Instances whose descent field Q(sqrt(-m)) has m >= kMaxDescentM are
// redrawn: the class group there is out of reach, and the sieve pipeline only meets small m.

#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "apsieve/germain.hpp"
#include "apsieve/lehmer.hpp"
#include "apsieve/localsolve.hpp"
#include "apsieve/selmer.hpp"
#include "apsieve/thue.hpp"
#include "oracles.hpp"

namespace soundness {

using namespace apsieve;

inline constexpr apsieve::u64 kMaxDescentM = 100000000;

struct Report {
    int instances = 0;
    int redrawn = 0;
    int descents_run = 0;
    int lehmer_instances = 0;
    std::vector<std::string> failures;
};

inline Report sweep(int count, u64 seed, u64 local_bound = 31)
{
    Report rep;
    std::mt19937_64 rng(seed);
    std::map<u64, std::unique_ptr<DescentEngine>> plain, with_local;
    const mpz_class cap("1000000000000");
    auto fail = [&](const std::string& what, int id, u64 p, long w1, long w2) {
        std::ostringstream os;
        os << what << ": case " << id << ", p = " << p << ", w1 = " << w1 << ", w2 = " << w2;
        rep.failures.push_back(os.str());
    };
    while (rep.instances < count) {
        const int id = 1 + static_cast<int>(rng() % 4);
        const u64 p = std::vector<u64>{5, 5, 7, 7, 11}[rng() % 5];
        const auto& t = case_template(id);
        const long wmax = p == 5 ? 40 : p == 7 ? 12 : 2;
        const long w1 = static_cast<long>(rng() % wmax) + 1, w2 = static_cast<long>(rng() % wmax) + 1;
        const mpz_class a = t.a.eval(p), b = t.b.eval(p);
        const mpz_class c = a * oracle::ipow(w2, p) - b * oracle::ipow(w1, 2 * p);
        if (c <= 0 || c > cap) continue;
        const PrimeMap A = PrimeMap::of(t.a, p), B = PrimeMap::of(t.b, p), C = PrimeMap::of(c.get_ui());
        const Reduction red = reduce_coprime(A, B, C, p);
        if (!red.contradiction && descent_data(red.form).m >= kMaxDescentM) {
            ++rep.redrawn;
            continue;
        }
        ++rep.instances;

        GermainSieve sieve(t.a, t.b, p, kDefaultKMax);
        if (auto q = sieve.eliminating_prime(c)) fail("germain q = " + std::to_string(*q), id, p, w1, w2);

        for (unsigned deg : {1u, 2u}) {
            LocalTestOptions opt;
            opt.sigma_degree = deg;
            const LocalOutcome lo = local_test(A, B, C, p, opt);
            if (lo.eliminated) fail("local " + lo.reason + " q = " + std::to_string(lo.q), id, p, w1, w2);
        }

        if (red.contradiction) {
            fail("reduction", id, p, w1, w2);
        } else {
            auto& e1 = plain[p];
            auto& e2 = with_local[p];
            if (!e1) e1 = std::make_unique<DescentEngine>(p);
            if (!e2) {
                e2 = std::make_unique<DescentEngine>(p);
                e2->set_local_bound(local_bound);
            }
            const DescentOutcome d1 = e1->run(red.form);
            if (d1.eliminated) fail("descent " + d1.reason, id, p, w1, w2);
            const DescentOutcome d2 = e2->run(red.form);
            if (d2.eliminated) fail("descent with local check " + d2.reason, id, p, w1, w2);
            ++rep.descents_run;
        }

        const ThueInstance th{a, b, c, p, id, 0};
        bool found = false;
        for (const auto& s : bounded_search(th, 10000)) found = found || (s.sigma == w2 && s.tau == w1 * w1);
        if (!found) fail("thue bounded search missed the solution", id, p, w1, w2);
    }

    // Lehmer side: x^2 + 3 d^2 = y^p from gamma = a + b sqrt(-3); the solver must return it.
    int lehmer = 0;
    while (lehmer < count / 10) {
        const unsigned p = rng() % 2 ? 5 : 7;
        const long bound = p == 5 ? 12 : 4;
        const long ga = static_cast<long>(rng() % (2 * bound + 1)) - bound, gb = static_cast<long>(rng() % bound) + 1;
        if (ga == 0 || std::gcd(ga, 3 * gb) != 1) continue;
        mpz_class X = 1, D = 0;
        for (unsigned i = 0; i < p; ++i) {
            const mpz_class nx = X * ga - 3 * D * gb, nd = X * gb + D * ga;
            X = nx, D = nd;
        }
        const mpz_class y = ga * ga + 3 * gb * gb;
        if (D == 0 || gcd(X, 3 * y) != 1) continue;
        const mpz_class C2 = 3 * D * D;
        if (C2 >= mpz_class(static_cast<unsigned long>(kFactorLimit))) continue;
        ++lehmer;
        const auto exps = candidate_exponents(1, C2.get_ui());
        if (std::find(exps.begin(), exps.end(), p) == exps.end())
            rep.failures.push_back("lehmer exponent " + std::to_string(p) + " missing for C2 = " + C2.get_str());
        bool hit = false;
        for (const auto& s : solve_C1x2_plus_C2(1, C2.get_ui(), p)) hit = hit || (s.x == abs(X) && s.y == y);
        if (!hit) rep.failures.push_back("lehmer solver missed x = " + X.get_str() + ", C2 = " + C2.get_str());
    }
    rep.lehmer_instances = lehmer;
    return rep;
}

}  // namespace soundness
