#pragma once

#include <map>
#include <string>
#include <vector>

#include "apsieve/localsolve.hpp"
#include "apsieve/quadfield.hpp"

namespace apsieve {

// B B' = v^2,  u = A B',  C B' = m n^2 with m squarefree.
struct DescentData {
    PrimeMap B_prime, v, u, n;
    u64 m = 1;
};

DescentData descent_data(const CoprimeForm& f);

// Prime ideals dividing u or 2 n sqrt(-m), sorted by (q, conjugate_flag).
std::vector<PrimeIdeal> selmer_primes(const QuadraticField& K, const DescentData& d);

struct SelmerBasisElement {
    FieldElement value;
    std::vector<u64> s_orders;  // ord at each prime of S, mod p
    bool from_class_group = false;
};

struct SelmerGroup {
    QuadraticField K;
    std::vector<PrimeIdeal> S;
    u64 p = 5;
    std::vector<SelmerBasisElement> basis;
    size_t unit_rank = 0;   // |S|
    size_t class_rank = 0;  // dim Cl_S[p]

    size_t dim() const { return basis.size(); }
    size_t index_of(const PrimeIdeal& P) const;  // S.size() when absent
};

// Needs p >= 5 prime (so units contribute nothing) and h(K) within the class table limit.
SelmerGroup selmer_group(const QuadraticField& K, const std::vector<PrimeIdeal>& S, u64 p);

// Orders of prod basis[i]^coords[i] at the primes of S, mod p.
std::vector<u64> s_orders(const SelmerGroup& G, const std::vector<u64>& coords);
FieldElement materialize(const SelmerGroup& G, const std::vector<u64>& coords);

struct EpsilonSet {
    std::vector<std::vector<u64>> coords;  // lexicographic
    size_t free_dim = 0;
    bool aborted = false;
    std::string diagnostic;
};

inline constexpr unsigned kMaxFreeDim = 6;

// Classes eps with Norm(eps)/u a rational p-th power.
EpsilonSet epsilon_set(const SelmerGroup& G, const PrimeMap& u, unsigned max_free_dim = kMaxFreeDim);

// Orders at one prime ideal, taken mod p by the lemma.
struct LocalOrders {
    i64 v = 0, n_sqrt = 0, two_v = 0, two_n_sqrt = 0, eps = 0, eps_bar = 0;
};

// 0 when nothing applies, else the first condition (1, 2, 3) that rules eps out.
int lemma_valuative(const LocalOrders& o, u64 p);
int lemma_valuative(const QuadraticField& K, const FieldElement& eps, const mpz_class& v, const mpz_class& n,
                    const PrimeIdeal& P, u64 p);

// C(p, q) is empty given residues: v, n mod q, images s1, s2 of sqrt(-m) and e1, e2 of eps.
bool cpq_empty(u64 q, u64 k, const std::vector<u64>& chi, u64 vq, u64 nq, u64 s1, u64 s2, u64 e1, u64 e2);
bool lemma_cpq(const QuadraticField& K, const FieldElement& eps, const mpz_class& v, const mpz_class& n, u64 p, u64 q);

// True when v sigma^p + n sqrt(-m) = eps eta^p has no solution with sigma in Z_l and eta in the
// completions above l: every class of sigma mod l^k (k <= max_depth) is shown to fail at some
// prime above l.  Cases it cannot decide (l = 2 split or ramified, l = p ramified) never kill.
bool local_descent_kills(const QuadraticField& K, const FieldElement& eps, const mpz_class& v, const mpz_class& n,
                         u64 ell, u64 p, int max_depth = 8);

inline constexpr u64 kDefaultKMaxSelmer = 200;

struct DescentOutcome {
    bool eliminated = false;
    std::string reason;  // "empty-epsilon", "all-epsilon-killed", "guard", "survives"
    u64 m = 0;
    size_t selmer_dim = 0;
    size_t epsilon_count = 0;
    size_t killed_valuative = 0;
    size_t killed_cpq = 0;
    size_t killed_local = 0;  // only with a local bound set
    std::vector<u64> cpq_primes;  // distinct q used by C(p, q) eliminations
    std::vector<std::vector<u64>> surviving;  // coords of the epsilons nothing killed
    std::string diagnostic;
};

// Per-exponent cache of auxiliary primes; not thread safe, use one per worker.
class DescentEngine {
public:
    DescentEngine(u64 p, u64 k_max_selmer = kDefaultKMaxSelmer, unsigned max_free_dim = kMaxFreeDim);

    u64 p() const { return p_; }
    // Also apply local_descent_kills at every prime l <= bound (0 disables; the default).
    void set_local_bound(u64 bound) { local_bound_ = bound; }
    DescentOutcome run(const CoprimeForm& f);

private:
    struct Aux {
        u64 q, k;
        std::vector<u64> chi;
    };
    struct Root {
        bool split = false;
        u64 s = 0;
    };
    const std::vector<Root>& roots_for(u64 m);

    u64 p_;
    u64 k_max_;
    unsigned max_free_dim_;
    u64 local_bound_ = 0;
    std::vector<Aux> aux_;
    std::map<u64, std::vector<Root>> roots_;
};

DescentOutcome descent_test(const CoprimeForm& f, u64 p, u64 k_max_selmer = kDefaultKMaxSelmer);

}  // namespace apsieve
