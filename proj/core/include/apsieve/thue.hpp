#pragma once

#include <string>
#include <vector>

#include "apsieve/cases.hpp"

namespace apsieve {

// a sigma^p - b tau^p = rhs, with sigma = w2 and tau = w1^2.
struct ThueInstance {
    mpz_class a, b, rhs;
    u64 p = 0;
    int case_id = 0;
    u64 r = 0;

    bool operator==(const ThueInstance&) const = default;
};

ThueInstance thue_instance(const TernaryInstance& inst);

struct ThueSolution {
    mpz_class sigma, tau;
    bool operator==(const ThueSolution&) const = default;
};

inline constexpr u64 kDefaultThueH = 10000;

// Every (sigma, tau) with |sigma|, |tau| <= H and tau a perfect square, sorted by (tau, sigma).
std::vector<ThueSolution> bounded_search(const ThueInstance& inst, u64 H, bool tau_square = true);

// Line format: "case p r a b rhs", sorted by (case, p, r).
std::string format_instance(const ThueInstance& inst);
ThueInstance parse_instance(const std::string& line);  // throws std::invalid_argument
void export_instances(std::vector<ThueInstance> list, const std::string& path);
std::vector<ThueInstance> import_instances(const std::string& path);

}  // namespace apsieve
