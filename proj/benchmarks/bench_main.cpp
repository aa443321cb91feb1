#include <benchmark/benchmark.h>

#include "apsieve/germain.hpp"
#include "apsieve/lehmer.hpp"
#include "apsieve/localsolve.hpp"
#include "apsieve/quadfield.hpp"
#include "apsieve/selmer.hpp"
#include "apsieve/thue.hpp"

using namespace apsieve;

namespace {

const std::vector<u64>& case1_p7_survivors()
{
    static const std::vector<u64> s = sieve_range(1, 7, 1, 200000, kDefaultKMax).survivors;
    return s;
}

void BM_MuSet(benchmark::State& st)
{
    const u64 p = static_cast<u64>(st.range(0));
    u64 q = 2 * p + 1;
    while (!is_prime(q)) q += 2 * p;
    for (auto _ : st) benchmark::DoNotOptimize(mu_set(p, q));
}
BENCHMARK(BM_MuSet)->Arg(7)->Arg(101)->Arg(1009);

void BM_SieveRange(benchmark::State& st)
{
    const u64 p = static_cast<u64>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(sieve_range(1, p, 1, 100000, kDefaultKMax));
    st.SetItemsProcessed(st.iterations() * 100000);
}
BENCHMARK(BM_SieveRange)->Arg(7)->Arg(23)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_ClassNumber(benchmark::State& st)
{
    u64 m = static_cast<u64>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(class_number(m));
}
BENCHMARK(BM_ClassNumber)->Arg(1999)->Arg(199999)->Arg(19999999);

void BM_ClassGroupStructure(benchmark::State& st)
{
    // fresh fields each iteration: class_group_table is memoized
    u64 m = static_cast<u64>(st.range(0));
    for (auto _ : st) {
        while (squarefree_decompose(m).first != m) ++m;
        benchmark::DoNotOptimize(class_group(m));
        ++m;
    }
}
BENCHMARK(BM_ClassGroupStructure)->Arg(100003)->Arg(10000019)->Unit(benchmark::kMicrosecond);

void BM_IntegerRoots(benchmark::State& st)
{
    const u64 p = static_cast<u64>(st.range(0));
    const GbPolynomial g = gb_polynomial(1, 29, 1, p);
    for (auto _ : st) benchmark::DoNotOptimize(integer_roots(g.coefficients));
}
BENCHMARK(BM_IntegerRoots)->Arg(5)->Arg(13)->Arg(37);

void BM_SolveLehmer(benchmark::State& st)
{
    const u64 r = static_cast<u64>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(solve_C1x2_plus_C2(1, 12 * r * r, 5));
}
BENCHMARK(BM_SolveLehmer)->Arg(29)->Arg(9973);

void BM_LocalTest(benchmark::State& st)
{
    const auto& rs = case1_p7_survivors();
    const CaseTemplate& t = case_template(1);
    size_t i = 0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(local_test(instantiate(t, 7, rs[i++ % rs.size()])));
    }
}
BENCHMARK(BM_LocalTest)->Unit(benchmark::kMicrosecond);

void BM_Descent(benchmark::State& st)
{
    const CaseTemplate& t = case_template(1);
    std::vector<CoprimeForm> forms;
    for (u64 r : case1_p7_survivors()) {
        const TernaryInstance inst = instantiate(t, 7, r);
        if (local_test(inst).eliminated) continue;
        const Reduction red = reduce_coprime(PrimeMap::of(t.a, 7), PrimeMap::of(t.b, 7), PrimeMap::of(inst.c.get_ui()), 7);
        if (!red.contradiction) forms.push_back(red.form);
        if (forms.size() == 64) break;
    }
    DescentEngine engine(7);
    size_t i = 0;
    for (auto _ : st) benchmark::DoNotOptimize(engine.run(forms[i++ % forms.size()]));
}
BENCHMARK(BM_Descent)->Unit(benchmark::kMicrosecond);

void BM_ThueBoundedSearch(benchmark::State& st)
{
    const ThueInstance th = thue_instance(instantiate(case_template(2), 5, 29));
    for (auto _ : st) benchmark::DoNotOptimize(bounded_search(th, static_cast<u64>(st.range(0))));
}
BENCHMARK(BM_ThueBoundedSearch)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
