// apsieve: run the elimination pipeline, print exponent bounds, resolve Lehmer cases, check records.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "apsieve/bounds.hpp"
#include "apsieve/lehmer.hpp"
#include "apsieve/pipeline.hpp"
#include "apsieve/records.hpp"

using namespace apsieve;

namespace {

std::vector<int> parse_cases(const std::string& s)
{
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        auto dash = tok.find('-');
        if (dash == std::string::npos) {
            out.push_back(std::stoi(tok));
        } else {
            int a = std::stoi(tok.substr(0, dash)), b = std::stoi(tok.substr(dash + 1));
            for (int c = a; c <= b; ++c) out.push_back(c);
        }
    }
    return out;
}

int cmd_run(RunConfig cfg, const std::string& cases, const std::string& p_max, const std::string& records, bool quiet)
{
    cfg.cases = parse_cases(cases);
    if (p_max != "auto") cfg.p_max = std::stoull(p_max);
    if (records == "full")
        cfg.records = RecordMode::full;
    else if (records == "compact")
        cfg.records = RecordMode::compact;
    else
        throw ConfigError("--records must be full or compact");

    auto t0 = std::chrono::steady_clock::now();
    auto last = t0;
    ProgressFn progress;
    if (!quiet)
        progress = [&](u64 done, u64 total) {
            auto now = std::chrono::steady_clock::now();
            if (done != total && now - last < std::chrono::seconds(2)) return;
            last = now;
            double s = std::chrono::duration<double>(now - t0).count();
            std::cerr << "\r" << done << "/" << total << " chunks, " << static_cast<long>(s) << " s" << std::flush;
            if (done == total) std::cerr << "\n";
        };
    RunResult res = run(cfg, progress);
    if (!quiet && res.chunks_resumed)
        std::cerr << "resumed " << res.chunks_resumed << " of " << res.chunks << " chunks from checkpoint\n";
    for (const auto& t : res.tables) {
        std::cout << "case " << t.case_id << " (" << branch_name(t.branch) << ")\n" << t.csv();
    }
    std::cout << "\n" << res.verdict.text;
    return exit_code(res);
}

int cmd_bounds(const std::vector<std::string>& r_max)
{
    const char* reference_r[] = {"4.9e1502", "1.9e1427", "1.5e2105", "1.37e4664"};
    for (int id = 1; id <= 4; ++id) {
        NormalizedForm f = normalize(case_template(id));
        std::cout << "case " << id << ": " << f.describe() << "\n";
        std::vector<std::string> rs = r_max;
        if (rs.empty()) rs = {reference_r[id - 1], "1000000"};
        for (const auto& r : rs) {
            MignotteTerms m = mignotte_terms(f, r);
            std::cout << "  r_max = " << r << ": p <= " << mignotte_bound(f, r) << "  (terms " << m.term1 << ", "
                      << m.term2 << ")\n";
        }
    }
    return 0;
}

int cmd_lehmer(int case_id, u64 r)
{
    CaseResolution res = resolve_case(case_id, r);
    if (res.exponents.empty()) {
        std::cout << "case " << case_id << ", r = " << r << ": excluded by gcd(x, r) = 1\n";
        return 0;
    }
    std::cout << "C1 = " << res.instance.C1 << ", C2 = " << res.instance.C2 << ", c = " << res.instance.c
              << ", d = " << res.instance.d << "\nexponents:";
    for (u64 p : res.exponents) std::cout << ' ' << p;
    std::cout << "\n";
    for (const auto& c : res.candidates)
        std::cout << "p = " << c.p << ": x = " << c.x << ", w2 = " << c.w2 << " -> " << c.note << "\n";
    if (res.solutions.empty()) std::cout << "no solutions of the original equation\n";
    for (const auto& s : res.solutions) std::cout << "SOLUTION x = " << s.x << ", y = " << s.y << ", p = " << s.p << "\n";
    return res.solutions.empty() ? 0 : 1;
}

int cmd_verify(const std::string& path, u64 every, u64 k_max_selmer)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::string line;
    u64 n = 0, counts[3] = {0, 0, 0};
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (n++ % every) continue;
        EliminationRecord rec = parse_json_line(line);
        WitnessCheck c = verify_record(rec, k_max_selmer);
        ++counts[static_cast<int>(c)];
        if (c == WitnessCheck::failed) std::cout << "FAILED: " << line << "\n";
    }
    std::cout << "verified " << counts[0] << ", skipped " << counts[1] << ", failed " << counts[2] << "\n";
    return counts[2] ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Elimination pipeline for sums of seven consecutive-step cubes equal to perfect powers"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string cases = "1-12", p_max = "auto", records = "compact";
    bool quiet = false;
    auto* run_cmd = app.add_subcommand("run", "run the pipeline and write tables, records and the verdict");
    run_cmd->add_option("--cases", cases, "case ids, e.g. 1,2,3,4 or 1-12")->capture_default_str();
    run_cmd->add_option("--p-min", cfg.p_min, "smallest exponent")->capture_default_str();
    run_cmd->add_option("--p-max", p_max, "largest exponent, or auto for the Mignotte bound")->capture_default_str();
    run_cmd->add_option("--r-min", cfg.r_min)->capture_default_str();
    run_cmd->add_option("--r-max", cfg.r_max)->capture_default_str();
    run_cmd->add_option("--k-max", cfg.k_max, "auxiliary primes q = 2kp+1, k <= k-max")->capture_default_str();
    run_cmd->add_option("--k-max-selmer", cfg.k_max_selmer, "same for the descent stage")->capture_default_str();
    run_cmd->add_option("--lift-cap", cfg.lift_cap, "largest residue set for local solubility")->capture_default_str();
    run_cmd->add_option("--thue-H", cfg.thue_H, "box size of the bounded Thue search")->capture_default_str();
    run_cmd->add_option("--selmer-local", cfg.selmer_local,
                        "also test local solubility of the descent equation at primes up to this bound (0: off)")
        ->capture_default_str();
    run_cmd->add_option("--chunk", cfg.chunk, "values of r per work unit")->capture_default_str();
    run_cmd->add_option("--workers", cfg.workers)->capture_default_str();
    run_cmd->add_option("--out", cfg.out_dir, "output directory")->required();
    run_cmd->add_flag("--resume", cfg.resume, "continue from the checkpoint in --out");
    run_cmd->add_option("--thue-export", cfg.thue_export, "write surviving Thue instances here");
    run_cmd->add_option("--records", records, "full or compact")->capture_default_str();
    run_cmd->add_flag("-q,--quiet", quiet, "no progress output");

    std::vector<std::string> r_max;
    auto* bounds_cmd = app.add_subcommand("bounds", "print the Mignotte exponent bounds for cases 1-4");
    bounds_cmd->add_option("--r-max", r_max, "decimal r bounds (default: break-even radius and 1e6)");

    int lcase = 7;
    u64 lr = 1;
    auto* lehmer_cmd = app.add_subcommand("lehmer", "resolve one Lehmer case for one r");
    lehmer_cmd->add_option("--case", lcase)->required()->check(CLI::Range(7, 10));
    lehmer_cmd->add_option("--r", lr)->required()->check(CLI::Range(u64{1}, kRMax));

    std::string rec_path;
    u64 every = 1, vk = kDefaultKMaxSelmer;
    auto* verify_cmd = app.add_subcommand("verify", "re-check the witnesses in a records.jsonl file");
    verify_cmd->add_option("records", rec_path)->required();
    verify_cmd->add_option("--every", every, "check every n-th record")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--k-max-selmer", vk)->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_cmd) return cmd_run(cfg, cases, p_max, records, quiet);
        if (*bounds_cmd) return cmd_bounds(r_max);
        if (*lehmer_cmd) return cmd_lehmer(lcase, lr);
        if (*verify_cmd) return cmd_verify(rec_path, every, vk);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
