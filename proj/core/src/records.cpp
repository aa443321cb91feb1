#include "apsieve/records.hpp"

#include <stdexcept>

#include <json.hpp>

namespace apsieve {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kStageNames[] = {"even-case",     "germain",  "local",       "selmer", "lehmer",
                                       "thue-bounded", "external-fact", "survivor", "trivial-xy0"};

}  // namespace

const char* stage_name(Stage s) { return kStageNames[static_cast<int>(s)]; }

Stage parse_stage(const std::string& s)
{
    for (int i = 0; i < 9; ++i)
        if (s == kStageNames[i]) return static_cast<Stage>(i);
    throw std::invalid_argument("unknown stage: " + s);
}

const WitnessValue* EliminationRecord::find(const std::string& key) const
{
    for (const auto& [k, v] : witness)
        if (k == key) return &v;
    return nullptr;
}

i64 EliminationRecord::get_int(const std::string& key) const
{
    const WitnessValue* v = find(key);
    if (!v || !std::holds_alternative<i64>(*v)) throw std::out_of_range("witness has no integer " + key);
    return std::get<i64>(*v);
}

std::string to_json_line(const EliminationRecord& rec)
{
    ojson j;
    j["case"] = rec.case_id;
    if (rec.p == 0)
        j["p"] = "*";
    else
        j["p"] = rec.p;
    if (rec.is_range())
        j["r"] = std::to_string(rec.r_lo) + "-" + std::to_string(rec.r_hi);
    else
        j["r"] = rec.r_lo;
    j["stage"] = stage_name(rec.stage);
    ojson w = ojson::object();
    for (const auto& [k, v] : rec.witness) std::visit([&](const auto& x) { w[k] = x; }, v);
    j["witness"] = w;
    return j.dump();
}

EliminationRecord parse_json_line(const std::string& line)
{
    EliminationRecord rec;
    try {
        ojson j = ojson::parse(line);
        rec.case_id = j.at("case").get<int>();
        const auto& p = j.at("p");
        if (p.is_string()) {
            if (p.get<std::string>() != "*") throw std::invalid_argument("bad p");
            rec.p = 0;
        } else {
            rec.p = p.get<u64>();
        }
        const auto& r = j.at("r");
        if (r.is_string()) {
            std::string s = r.get<std::string>();
            auto dash = s.find('-');
            if (dash == std::string::npos) throw std::invalid_argument("bad r range");
            rec.r_lo = std::stoull(s.substr(0, dash));
            rec.r_hi = std::stoull(s.substr(dash + 1));
        } else {
            rec.r_lo = rec.r_hi = r.get<u64>();
        }
        rec.stage = parse_stage(j.at("stage").get<std::string>());
        for (const auto& [k, v] : j.at("witness").items()) {
            if (v.is_number_integer())
                rec.witness.emplace_back(k, v.get<i64>());
            else if (v.is_string())
                rec.witness.emplace_back(k, v.get<std::string>());
            else if (v.is_array() && (v.empty() || v.front().is_number_integer()))
                rec.witness.emplace_back(k, v.get<std::vector<i64>>());
            else if (v.is_array())
                rec.witness.emplace_back(k, v.get<std::vector<std::string>>());
            else
                throw std::invalid_argument("unsupported witness value for " + k);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad record line: ") + e.what());
    }
    return rec;
}

}  // namespace apsieve
