#pragma once

#include <string>

#include "apsieve/cases.hpp"

namespace apsieve {

// |a0 * U^p - b0 * V^p| = c_mult * r^2 with U = u_scale * w2, V = v_scale * w1^2.
// a0 is the larger coefficient; a0_on_u records which power it multiplies.
struct NormalizedForm {
    int case_id = 0;
    u64 a0 = 1;
    u64 b0 = 1;
    u64 c_mult = 1;
    u64 multiplier = 1;
    u64 u_scale = 1;
    u64 v_scale = 1;
    bool a0_on_u = true;

    std::string describe() const;
};

NormalizedForm normalize(const CaseTemplate& t);

struct MignotteTerms {
    double term1 = 0;   // 3 log(1.5 |c / b|)
    double term2 = 0;   // 7400 log A / log(1 + log A / log(a / b))
    double value = 0;   // max of the two
};

// r_max is a decimal string so that values such as "4.9e1502" are accepted.
MignotteTerms mignotte_terms(const NormalizedForm& f, const std::string& r_max);
u64 mignotte_bound(const NormalizedForm& f, const std::string& r_max);
u64 mignotte_bound(const NormalizedForm& f, u64 r_max);

}  // namespace apsieve
