#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "apsieve/cases.hpp"
#include "apsieve/germain.hpp"
#include "apsieve/records.hpp"
#include "apsieve/selmer.hpp"
#include "apsieve/thue.hpp"

namespace apsieve {

// full: one record per (case, p, r).  compact: r values eliminated by the Germain sieve (and Lehmer
// instances with nothing to report) are folded into one range record per chunk.
enum class RecordMode { full, compact };

struct RunConfig {
    std::vector<int> cases{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    u64 p_min = 5;
    std::optional<u64> p_max;  // none: Mignotte bound at r_max, per case
    u64 r_min = 1;
    u64 r_max = kRMax;
    u64 k_max = kDefaultKMax;
    u64 k_max_selmer = kDefaultKMaxSelmer;
    u64 lift_cap = 20000000;
    u64 thue_H = kDefaultThueH;
    u64 selmer_local = 0;  // 0: off; else bound on l for the local descent check
    unsigned workers = 1;
    u64 chunk = 10000;
    RecordMode records = RecordMode::compact;
    std::string out_dir;
    std::string thue_export;  // empty: no export
    bool resume = false;

    void validate() const;  // throws ConfigError
    // Everything that affects results, in a fixed textual form (workers and paths excluded).
    std::string canonical() const;
    u64 hash() const;  // FNV-1a of canonical()
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct StageCounts {
    u64 germain = 0, local = 0, selmer = 0, thue = 0;
};

struct SieveRow {
    u64 p = 0;
    StageCounts counts;
    bool external = false;
};

struct LehmerRow {
    u64 p = 0;
    u64 instances = 0;
    u64 solver_solutions = 0;
    u64 solutions = 0;
};

struct CaseTable {
    int case_id = 0;
    Branch branch = Branch::sieve;
    u64 r_min = 1, r_max = 1;
    std::vector<SieveRow> sieve_rows;
    std::vector<LehmerRow> lehmer_rows;
    std::string even_statement;

    std::string csv() const;
    const SieveRow* row(u64 p) const;
};

struct Verdict {
    bool only_trivial = false;
    std::vector<std::string> cited;      // external facts, not computed here
    std::vector<std::string> delegated;  // bounded Thue search only
    std::vector<std::string> unresolved; // actual solutions or failures
    std::string text;
};

struct RunResult {
    std::vector<CaseTable> tables;
    Verdict verdict;
    u64 records = 0;
    u64 chunks = 0;
    u64 chunks_resumed = 0;
    std::vector<ThueInstance> thue;
};

using ProgressFn = std::function<void(u64 done, u64 total)>;

// p bound for a sieve case at the configured r_max.
u64 auto_p_max(int case_id, u64 r_max);

// Writes caseK_table.csv, records.jsonl, verdict.txt and checkpoint.jsonl under out_dir.
RunResult run(const RunConfig& config, const ProgressFn& progress = {});
RunResult resume(RunConfig config, const ProgressFn& progress = {});

enum class WitnessCheck { verified, skipped, failed };
const char* witness_check_name(WitnessCheck c);

// Re-derives a record's witness independently of the stage that produced it: Germain primes by
// b_set_is_empty, local certificates by residue enumeration modulo q^e (when q^e <= 1e6), Lehmer
// rejections by evaluating C1 X^2 + C2 = w2^p.  Range and survivor records are skipped.
WitnessCheck verify_record(const EliminationRecord& rec, u64 k_max_selmer = kDefaultKMaxSelmer);

// 0 iff the verdict holds with nothing unresolved.
int exit_code(const RunResult& r);

}  // namespace apsieve
