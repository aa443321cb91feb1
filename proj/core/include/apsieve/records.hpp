#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "apsieve/arith.hpp"

namespace apsieve {

enum class Stage { even_case, germain, local, selmer, lehmer, thue_bounded, external_fact, survivor, trivial_xy0 };

const char* stage_name(Stage s);
Stage parse_stage(const std::string& s);  // throws std::invalid_argument

using WitnessValue = std::variant<i64, std::string, std::vector<i64>, std::vector<std::string>>;

// Terminal outcome for (case, p, r).  p = 0 stands for every exponent; r_lo < r_hi is a range record
// covering every r in [r_lo, r_hi] that has no record of its own.
struct EliminationRecord {
    int case_id = 0;
    u64 p = 0;
    u64 r_lo = 0, r_hi = 0;
    Stage stage = Stage::survivor;
    std::vector<std::pair<std::string, WitnessValue>> witness;  // kept in insertion order

    bool is_range() const { return r_lo != r_hi; }
    EliminationRecord& with(std::string key, WitnessValue v)
    {
        witness.emplace_back(std::move(key), std::move(v));
        return *this;
    }
    const WitnessValue* find(const std::string& key) const;
    i64 get_int(const std::string& key) const;  // throws std::out_of_range when absent or not an integer
    bool operator==(const EliminationRecord&) const = default;
};

// One JSON object per line: {"case":..,"p":..,"r":..,"stage":..,"witness":{..}}.
std::string to_json_line(const EliminationRecord& rec);
EliminationRecord parse_json_line(const std::string& line);  // throws std::invalid_argument

}  // namespace apsieve
