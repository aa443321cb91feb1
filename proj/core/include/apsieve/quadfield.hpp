#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "apsieve/arith.hpp"

namespace apsieve {

// Q(sqrt(-m)) with its maximal order.
struct QuadraticField {
    u64 m = 1;
    i64 discriminant = -4;
    bool ring_is_maximal = true;

    // disc = -m: integral basis 1, (1 + sqrt(-m))/2.
    bool half_integral() const { return discriminant & 1; }
    bool operator==(const QuadraticField&) const = default;
};

QuadraticField make_field(u64 m);

// (x + y*sqrt(-m)) / den with den in {1, 2}.
struct FieldElement {
    mpz_class x = 0;
    mpz_class y = 0;
    unsigned den = 1;

    bool is_zero() const { return x == 0 && y == 0; }
    bool operator==(const FieldElement& o) const { return x == o.x && y == o.y && den == o.den; }
};

FieldElement make_element(const QuadraticField& K, mpz_class x, mpz_class y, unsigned den = 1);
FieldElement mul(const QuadraticField& K, const FieldElement& a, const FieldElement& b);
FieldElement pow(const QuadraticField& K, const FieldElement& a, unsigned long e);
FieldElement conj(const FieldElement& a);
mpz_class norm(const QuadraticField& K, const FieldElement& a);
std::string to_string(const FieldElement& a);

enum class PrimeKind { split, inert, ramified };
const char* kind_name(PrimeKind k);

// For split q, root is the image of sqrt(-m) in F_q (odd q) or of (1+sqrt(-m))/2 (q = 2).
// The first prime of a split pair carries the smaller root.
struct PrimeIdeal {
    u64 q = 2;
    PrimeKind kind = PrimeKind::inert;
    u64 root = 0;
    bool conjugate_flag = false;

    int residue_degree() const { return kind == PrimeKind::inert ? 2 : 1; }
    int ramification() const { return kind == PrimeKind::ramified ? 2 : 1; }
    bool operator==(const PrimeIdeal&) const = default;
};

PrimeIdeal split_type(const QuadraticField& K, u64 q);
// All primes above q, first prime of a split pair first.
std::vector<PrimeIdeal> primes_above(const QuadraticField& K, u64 q);
PrimeIdeal conjugate(const PrimeIdeal& P);

int valuation(const QuadraticField& K, const FieldElement& e, const PrimeIdeal& P);
int valuation(const QuadraticField& K, const mpz_class& rational, const PrimeIdeal& P);
u64 residue_at_split(const QuadraticField& K, const FieldElement& e, const PrimeIdeal& P);

// q-adic square root of -m matching the label of a split prime, modulo q^prec.
mpz_class padic_root(const QuadraticField& K, const PrimeIdeal& P, int prec);

// ---- binary quadratic forms and ideals ----

struct Form {
    i64 a = 1, b = 1, c = 1;
    bool operator==(const Form&) const = default;
};

Form reduce_form(i64 a, i64 b, i64 c);
Form compose(const Form& f, const Form& g, i64 disc);
Form form_pow(const Form& f, u64 e, i64 disc);
Form identity_form(i64 disc);
std::vector<Form> reduced_forms(i64 disc);  // primitive reduced forms, sorted by (a, b)

// content * [a, (-b + sqrt(D))/2]
struct Ideal {
    mpz_class content = 1;
    mpz_class a = 1;
    mpz_class b = 0;
};

Ideal unit_ideal(const QuadraticField& K);
Ideal ideal_of(const QuadraticField& K, const PrimeIdeal& P);
Ideal ideal_mul(const QuadraticField& K, const Ideal& I, const Ideal& J);
Ideal ideal_pow(const QuadraticField& K, const Ideal& I, u64 e);
mpz_class ideal_norm(const Ideal& I);
Form ideal_class(const QuadraticField& K, const Ideal& I);
Ideal ideal_from_form(const Form& f);
// Generator of a principal ideal, none when the ideal is not principal.
std::optional<FieldElement> principal_generator(const QuadraticField& K, const Ideal& I);

struct ClassGroup {
    u64 m = 1;
    u64 h = 1;
    std::vector<u64> cyclic_factors;  // d_1 | d_2 | ... , empty when h = 1
    std::vector<Form> generators;
};

// Class group with an explicit discrete-log table; used by the Selmer machinery.
class ClassGroupTable {
public:
    ClassGroupTable(const QuadraticField& K, ClassGroup G);

    const ClassGroup& group() const { return group_; }
    i64 disc() const { return disc_; }
    u64 exponent() const { return group_.cyclic_factors.empty() ? 1 : group_.cyclic_factors.back(); }
    std::vector<u64> dlog(const Form& f) const;  // coordinates w.r.t. generators
    Form element(const std::vector<u64>& coords) const;
    u64 index_of(const std::vector<u64>& coords) const;
    std::vector<u64> coords_of(u64 index) const;

private:
    ClassGroup group_;
    i64 disc_;
    std::unordered_map<u64, u64> index_;  // reduced form key -> mixed-radix index
};

u64 class_number(u64 m);
ClassGroup class_group(u64 m);
std::shared_ptr<const ClassGroupTable> class_group_table(u64 m);

// Limit on h for which full structure and discrete logs are computed.
inline constexpr u64 kClassTableLimit = 2000000;

}  // namespace apsieve
