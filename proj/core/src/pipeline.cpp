#include "apsieve/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "apsieve/bounds.hpp"
#include "apsieve/lehmer.hpp"
#include "apsieve/localsolve.hpp"
#include "apsieve/records.hpp"

namespace apsieve {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kExternalCitation = "p=5 handled by Chabauty on a genus 2 curve with rank 1 Jacobian (cited)";


enum class UnitKind { even, external, sieve, lehmer };

struct Unit {
    int case_id = 0;
    u64 p = 0;
    u64 lo = 0, hi = 0;
    UnitKind kind = UnitKind::sieve;

    auto key() const { return std::tuple(case_id, p, lo); }
};

struct ChunkResult {
    StageCounts counts;
    std::map<u64, LehmerRow> lehmer;
    std::vector<std::string> records;
    std::vector<std::string> thue;
    std::vector<std::string> unresolved;
};

std::string unit_id(const Unit& u)
{
    return std::to_string(u.case_id) + ":" + std::to_string(u.p) + ":" + std::to_string(u.lo) + ":" +
           std::to_string(u.hi);
}

json to_json(const Unit& u, const ChunkResult& c)
{
    json j;
    j["unit"] = unit_id(u);
    j["counts"] = {c.counts.germain, c.counts.local, c.counts.selmer, c.counts.thue};
    json lr = json::array();
    for (const auto& [p, row] : c.lehmer) lr.push_back({p, row.instances, row.solver_solutions, row.solutions});
    j["lehmer"] = lr;
    j["records"] = c.records;
    j["thue"] = c.thue;
    j["unresolved"] = c.unresolved;
    return j;
}

ChunkResult from_json(const json& j)
{
    ChunkResult c;
    const auto& k = j.at("counts");
    c.counts = {k.at(0).get<u64>(), k.at(1).get<u64>(), k.at(2).get<u64>(), k.at(3).get<u64>()};
    for (const auto& row : j.at("lehmer")) {
        LehmerRow r{row.at(0).get<u64>(), row.at(1).get<u64>(), row.at(2).get<u64>(), row.at(3).get<u64>()};
        c.lehmer[r.p] = r;
    }
    c.records = j.at("records").get<std::vector<std::string>>();
    c.thue = j.at("thue").get<std::vector<std::string>>();
    c.unresolved = j.at("unresolved").get<std::vector<std::string>>();
    return c;
}

std::vector<Unit> plan(const RunConfig& cfg)
{
    std::vector<int> cases = cfg.cases;
    std::sort(cases.begin(), cases.end());
    cases.erase(std::unique(cases.begin(), cases.end()), cases.end());
    std::vector<Unit> units;
    auto chunks = [&](int id, u64 p, UnitKind kind) {
        for (u64 lo = cfg.r_min; lo <= cfg.r_max; lo += cfg.chunk)
            units.push_back({id, p, lo, std::min(cfg.r_max, lo + cfg.chunk - 1), kind});
    };
    for (int id : cases) {
        const CaseTemplate& t = case_template(id);
        switch (t.branch) {
        case Branch::even_contradiction:
            units.push_back({id, 0, cfg.r_min, cfg.r_max, UnitKind::even});
            break;
        case Branch::lehmer:
            chunks(id, 0, UnitKind::lehmer);
            break;
        case Branch::sieve: {
            u64 hi = cfg.p_max ? *cfg.p_max : auto_p_max(id, cfg.r_max);
            for (u64 p = std::max<u64>(cfg.p_min, 5); p <= hi; p = next_prime(p)) {
                if (!is_prime(p)) continue;
                if (p == 5 && id != 2)
                    units.push_back({id, p, cfg.r_min, cfg.r_max, UnitKind::external});
                else
                    chunks(id, p, UnitKind::sieve);
            }
            break;
        }
        }
    }
    std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) { return a.key() < b.key(); });
    return units;
}

EliminationRecord rec(int case_id, u64 p, u64 lo, u64 hi, Stage s)
{
    EliminationRecord r;
    r.case_id = case_id;
    r.p = p;
    r.r_lo = lo;
    r.r_hi = hi;
    r.stage = s;
    return r;
}

// Per-worker state reused across consecutive chunks of one (case, p).
struct WorkerCache {
    int case_id = 0;
    u64 p = 0;
    std::unique_ptr<GermainSieve> sieve;
    std::unique_ptr<DescentEngine> descent;
};

void process_sieve(const RunConfig& cfg, const Unit& u, WorkerCache& cache, ChunkResult& out)
{
    const CaseTemplate& t = case_template(u.case_id);
    if (!cache.sieve || cache.case_id != u.case_id || cache.p != u.p) {
        cache.case_id = u.case_id;
        cache.p = u.p;
        cache.sieve = std::make_unique<GermainSieve>(t.a, t.b, u.p, cfg.k_max);
        cache.descent = std::make_unique<DescentEngine>(u.p, cfg.k_max_selmer);
        if (cfg.selmer_local) cache.descent->set_local_bound(cfg.selmer_local);
    }
    const auto forced = t.coprimality_primes();
    const bool full = cfg.records == RecordMode::full;
    u64 folded = 0, folded_gcd = 0;
    LocalTestOptions lopt;
    lopt.enum_cap = cfg.lift_cap;

    for (u64 r = u.lo; r <= u.hi; ++r) {
        u64 gp = 0;
        for (u64 q : forced)
            if (r % q == 0) {
                gp = q;
                break;
            }
        if (gp) {
            if (full)
                out.records.push_back(
                    to_json_line(rec(u.case_id, u.p, r, r, Stage::germain).with("gcd_prime", static_cast<i64>(gp))));
            else
                ++folded_gcd;
            continue;
        }
        if (auto q = cache.sieve->eliminating_prime(t.c0, r)) {
            if (full)
                out.records.push_back(
                    to_json_line(rec(u.case_id, u.p, r, r, Stage::germain).with("q", static_cast<i64>(*q))));
            else
                ++folded;
            continue;
        }
        ++out.counts.germain;

        TernaryInstance inst = instantiate(t, u.p, r);
        LocalOutcome lo = local_test(inst, lopt);
        if (lo.eliminated) {
            auto e = rec(u.case_id, u.p, r, r, Stage::local).with("reason", lo.reason).with("q", static_cast<i64>(lo.q));
            if (lo.reason == "local") e.with("e", static_cast<i64>(lo.e));
            out.records.push_back(to_json_line(e));
            continue;
        }
        ++out.counts.local;

        PrimeMap c = PrimeMap::of(t.c0);
        for (const auto& f : factor(r).factors) c.mul(f.prime, 2 * f.exp);
        Reduction red = reduce_coprime(PrimeMap::of(t.a, u.p), PrimeMap::of(t.b, u.p), c, u.p);
        DescentOutcome d = cache.descent->run(red.form);
        if (d.eliminated) {
            std::vector<i64> cpq(d.cpq_primes.begin(), d.cpq_primes.end());
            auto e = rec(u.case_id, u.p, r, r, Stage::selmer)
                         .with("reason", d.reason)
                         .with("m", static_cast<i64>(d.m))
                         .with("selmer_dim", static_cast<i64>(d.selmer_dim))
                         .with("epsilons", static_cast<i64>(d.epsilon_count))
                         .with("killed_valuative", static_cast<i64>(d.killed_valuative))
                         .with("killed_cpq", static_cast<i64>(d.killed_cpq));
            if (cfg.selmer_local) e.with("killed_local", static_cast<i64>(d.killed_local));
            e.with("cpq_primes", cpq);
            out.records.push_back(to_json_line(e));
            continue;
        }
        ++out.counts.selmer;

        ThueInstance ti = thue_instance(inst);
        auto sols = bounded_search(ti, cfg.thue_H);
        ++out.counts.thue;
        if (sols.empty()) {
            auto e = rec(u.case_id, u.p, r, r, Stage::thue_bounded)
                         .with("H", static_cast<i64>(cfg.thue_H))
                         .with("descent", d.reason)
                         .with("surviving_epsilons", static_cast<i64>(d.surviving.size()));
            out.records.push_back(to_json_line(e));
            out.thue.push_back(format_instance(ti));
        } else {
            std::vector<std::string> sig, tau;
            for (const auto& s : sols) sig.push_back(s.sigma.get_str()), tau.push_back(s.tau.get_str());
            out.records.push_back(
                to_json_line(rec(u.case_id, u.p, r, r, Stage::survivor).with("sigma", sig).with("tau", tau)));
            out.thue.push_back(format_instance(ti));
            out.unresolved.push_back("case " + std::to_string(u.case_id) + ", p = " + std::to_string(u.p) +
                                     ", r = " + std::to_string(r) + ": bounded Thue search found " +
                                     std::to_string(sols.size()) + " solution(s)");
        }
    }
    if (folded || folded_gcd)
        out.records.insert(out.records.begin(),
                           to_json_line(rec(u.case_id, u.p, u.lo, u.hi, Stage::germain)
                                            .with("eliminated", static_cast<i64>(folded))
                                            .with("gcd_excluded", static_cast<i64>(folded_gcd))));
}

void process_lehmer(const RunConfig& cfg, const Unit& u, ChunkResult& out)
{
    const bool full = cfg.records == RecordMode::full;
    u64 folded = 0;
    const auto forced = case_template(u.case_id).coprimality_primes();
    for (u64 r = u.lo; r <= u.hi; ++r) {
        u64 gp = 0;
        for (u64 q : forced)
            if (r % q == 0) {
                gp = q;
                break;
            }
        if (gp) {
            if (full)
                out.records.push_back(
                    to_json_line(rec(u.case_id, 0, r, r, Stage::lehmer).with("gcd_prime", static_cast<i64>(gp))));
            else
                ++folded;
            continue;
        }
        CaseResolution res = resolve_case(u.case_id, r);
        std::vector<u64> ps;
        for (u64 p : res.exponents)
            if (p >= cfg.p_min && (!cfg.p_max || p <= *cfg.p_max)) ps.push_back(p);
        if (ps.size() != res.exponents.size()) res = resolve_case(u.case_id, r, ps);
        for (u64 p : res.exponents) ++out.lehmer[p].instances;
        for (const auto& c : res.candidates) ++out.lehmer[c.p].solver_solutions;
        for (const auto& s : res.solutions) ++out.lehmer[s.p].solutions;

        if (!res.solutions.empty()) {
            std::vector<std::string> xs;
            for (const auto& s : res.solutions)
                xs.push_back(std::to_string(s.p) + ":" + s.x.get_str() + ":" + s.y.get_str());
            out.records.push_back(to_json_line(rec(u.case_id, 0, r, r, Stage::survivor).with("solutions", xs)));
            out.unresolved.push_back("case " + std::to_string(u.case_id) + ", r = " + std::to_string(r) +
                                     ": solution of the original equation found");
            continue;
        }
        if (!full && res.candidates.empty()) {
            ++folded;
            continue;
        }
        std::vector<i64> exps(res.exponents.begin(), res.exponents.end());
        std::vector<std::string> rejected;
        for (const auto& c : res.candidates)
            rejected.push_back(std::to_string(c.p) + ":" + c.x.get_str() + ":" + c.w2.get_str());
        out.records.push_back(
            to_json_line(rec(u.case_id, 0, r, r, Stage::lehmer).with("exponents", exps).with("rejected", rejected)));
    }
    if (folded)
        out.records.insert(out.records.begin(), to_json_line(rec(u.case_id, 0, u.lo, u.hi, Stage::lehmer)
                                                                 .with("count", static_cast<i64>(folded))));
}

void process_even(const RunConfig& cfg, const Unit& u, ChunkResult& out)
{
    EvenCaseCertificate cert = eliminate_even_case(case_template(u.case_id));
    u64 hi = cfg.p_max ? *cfg.p_max : 100000;
    for (u64 p = std::max<u64>(cfg.p_min, 5); p <= hi; p = next_prime(p))
        if (is_prime(p) && !cert.verify(p))
            throw std::logic_error("even-case certificate fails at p = " + std::to_string(p));
    out.records.push_back(to_json_line(rec(u.case_id, 0, u.lo, u.hi, Stage::even_case)
                                           .with("v2_c_side", static_cast<i64>(cert.v2_c_side))
                                           .with("statement", cert.statement)));
}

ChunkResult process(const RunConfig& cfg, const Unit& u, WorkerCache& cache)
{
    ChunkResult out;
    switch (u.kind) {
    case UnitKind::even: process_even(cfg, u, out); break;
    case UnitKind::external:
        out.records.push_back(
            to_json_line(rec(u.case_id, u.p, u.lo, u.hi, Stage::external_fact).with("citation", kExternalCitation)));
        break;
    case UnitKind::sieve: process_sieve(cfg, u, cache, out); break;
    case UnitKind::lehmer: process_lehmer(cfg, u, out); break;
    }
    return out;
}

void write_atomic(const fs::path& path, const std::string& data)
{
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os << data;
        if (!os) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

// Checkpoint: first line is the config header, then one completed chunk per line.
std::map<std::string, ChunkResult> load_checkpoint(const fs::path& path, const RunConfig& cfg)
{
    std::map<std::string, ChunkResult> done;
    std::ifstream is(path, std::ios::binary);
    if (!is) return done;
    std::string line;
    if (!std::getline(is, line) || line.empty()) return done;
    json head;
    try {
        head = json::parse(line);
    } catch (const json::exception&) {
        return done;  // torn header: nothing was completed
    }
    if (head.value("config_hash", std::string()) != std::to_string(cfg.hash()))
        throw ConfigError("checkpoint was written with a different configuration (hash mismatch)");
    while (std::getline(is, line)) {
        try {
            json j = json::parse(line);
            done[j.at("unit").get<std::string>()] = from_json(j);
        } catch (const json::exception&) {
            break;  // torn tail from an interrupted write
        }
    }
    return done;
}

std::string header_line(const RunConfig& cfg)
{
    json h;
    h["config_hash"] = std::to_string(cfg.hash());
    h["config"] = cfg.canonical();
    return h.dump();
}

std::string describe_cell(int case_id, u64 p)
{
    return "case " + std::to_string(case_id) + ", p = " + std::to_string(p);
}

}  // namespace

void RunConfig::validate() const
{
    if (cases.empty()) throw ConfigError("no cases selected");
    for (int c : cases)
        if (c < 1 || c > 12) throw ConfigError("case ids are 1..12");
    if (r_min < 1 || r_max > kRMax || r_min > r_max) throw ConfigError("r range must satisfy 1 <= r_min <= r_max <= 1e6");
    if (p_min < 5) throw ConfigError("p_min must be at least 5");
    if (p_max && *p_max < p_min) throw ConfigError("p_max below p_min");
    if (k_max < 1 || k_max_selmer < 1) throw ConfigError("k_max values must be positive");
    if (workers < 1) throw ConfigError("workers must be positive");
    if (chunk < 1) throw ConfigError("chunk must be positive");
    if (thue_H < 1) throw ConfigError("thue H must be positive");
    if (out_dir.empty()) throw ConfigError("an output directory is required");
}

std::string RunConfig::canonical() const
{
    std::vector<int> cs = cases;
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    std::ostringstream os;
    os << "cases=";
    for (size_t i = 0; i < cs.size(); ++i) os << (i ? "," : "") << cs[i];
    os << ";p=" << p_min << ".." << (p_max ? std::to_string(*p_max) : std::string("auto")) << ";r=" << r_min << ".."
       << r_max << ";k_max=" << k_max << ";k_max_selmer=" << k_max_selmer << ";lift_cap=" << lift_cap
       << ";thue_H=" << thue_H << ";selmer_local=" << selmer_local << ";chunk=" << chunk
       << ";records=" << (records == RecordMode::full ? "full" : "compact");
    return os.str();
}

u64 RunConfig::hash() const
{
    u64 h = 1469598103934665603ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

const SieveRow* CaseTable::row(u64 p) const
{
    for (const auto& r : sieve_rows)
        if (r.p == p) return &r;
    return nullptr;
}

std::string CaseTable::csv() const
{
    std::ostringstream os;
    switch (branch) {
    case Branch::sieve:
        os << "p,germain,local,selmer,thue\n";
        for (const auto& r : sieve_rows) {
            if (r.external)
                os << r.p << ",external-fact\n";
            else
                os << r.p << ',' << r.counts.germain << ',' << r.counts.local << ',' << r.counts.selmer << ','
                   << r.counts.thue << '\n';
        }
        break;
    case Branch::lehmer:
        os << "p,instances,solver_solutions,solutions\n";
        for (const auto& r : lehmer_rows)
            os << r.p << ',' << r.instances << ',' << r.solver_solutions << ',' << r.solutions << '\n';
        break;
    case Branch::even_contradiction:
        os << "r_min,r_max,stage\n";
        if (!even_statement.empty()) os << r_min << ',' << r_max << ",even-case\n";
        break;
    }
    return os.str();
}

u64 auto_p_max(int case_id, u64 r_max)
{
    return mignotte_bound(normalize(case_template(case_id)), r_max);
}

RunResult run(const RunConfig& cfg, const ProgressFn& progress)
{
    cfg.validate();
    const fs::path out(cfg.out_dir);
    fs::create_directories(out);
    const fs::path ckpt = out / "checkpoint.jsonl";

    std::vector<Unit> units = plan(cfg);
    std::map<std::string, ChunkResult> done;
    if (cfg.resume) done = load_checkpoint(ckpt, cfg);

    // Rewrite the checkpoint with only intact lines, then append as chunks finish.
    {
        std::string body = header_line(cfg) + "\n";
        for (const auto& u : units) {
            auto it = done.find(unit_id(u));
            if (it != done.end()) body += to_json(u, it->second).dump() + "\n";
        }
        write_atomic(ckpt, body);
    }
    RunResult result;
    result.chunks = units.size();
    for (const auto& u : units)
        if (done.count(unit_id(u))) ++result.chunks_resumed;

    std::vector<size_t> todo;
    for (size_t i = 0; i < units.size(); ++i)
        if (!done.count(unit_id(units[i]))) todo.push_back(i);

    std::mutex mu;
    std::condition_variable cv;
    std::vector<std::pair<size_t, ChunkResult>> finished;
    std::exception_ptr failure;
    std::atomic<size_t> next{0};
    size_t running = std::min<size_t>(cfg.workers, todo.size());

    auto worker = [&] {
        WorkerCache cache;
        for (;;) {
            size_t k = next.fetch_add(1);
            if (k >= todo.size()) break;
            const Unit& u = units[todo[k]];
            try {
                ChunkResult c = process(cfg, u, cache);
                std::lock_guard lk(mu);
                finished.emplace_back(todo[k], std::move(c));
            } catch (const std::exception& e) {
                std::lock_guard lk(mu);
                if (!failure)
                    failure = std::make_exception_ptr(std::runtime_error(
                        "case " + std::to_string(u.case_id) + ", p = " + std::to_string(u.p) + ", r in [" +
                        std::to_string(u.lo) + ", " + std::to_string(u.hi) + "]: " + e.what()));
                next = todo.size();
            }
            cv.notify_one();
        }
        std::lock_guard lk(mu);
        --running;
        cv.notify_one();
    };

    std::vector<std::thread> pool;
    for (size_t i = 0; i < running; ++i) pool.emplace_back(worker);
    {
        std::ofstream log(ckpt, std::ios::binary | std::ios::app);
        u64 completed = result.chunks_resumed;
        if (progress) progress(completed, units.size());
        std::unique_lock lk(mu);
        for (;;) {
            cv.wait(lk, [&] { return !finished.empty() || running == 0; });
            auto batch = std::move(finished);
            finished.clear();
            bool stop = running == 0;
            lk.unlock();
            for (auto& [idx, c] : batch) {
                log << to_json(units[idx], c).dump() << '\n';
                log.flush();
                done[unit_id(units[idx])] = std::move(c);
                ++completed;
            }
            if (progress && !batch.empty()) progress(completed, units.size());
            lk.lock();
            if (stop && finished.empty()) break;
        }
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    // Assemble outputs in key order.
    std::string records;
    std::map<int, CaseTable> tables;
    std::map<std::pair<int, u64>, SieveRow> rows;
    std::map<std::pair<int, u64>, LehmerRow> lrows;
    std::vector<std::string> thue_lines;
    Verdict& v = result.verdict;
    for (int id : cfg.cases) {
        CaseTable& tab = tables[id];
        tab.case_id = id;
        tab.branch = case_template(id).branch;
        tab.r_min = cfg.r_min;
        tab.r_max = cfg.r_max;
    }
    for (const auto& u : units) {
        const ChunkResult& c = done.at(unit_id(u));
        for (const auto& r : c.records) {
            records += r;
            records += '\n';
            ++result.records;
        }
        CaseTable& tab = tables[u.case_id];
        switch (u.kind) {
        case UnitKind::even:
            tab.even_statement = eliminate_even_case(case_template(u.case_id)).statement;
            break;
        case UnitKind::external: {
            SieveRow& row = rows[{u.case_id, u.p}];
            row.p = u.p;
            row.external = true;
            v.cited.push_back(describe_cell(u.case_id, u.p) + ": " + kExternalCitation);
            break;
        }
        case UnitKind::sieve: {
            SieveRow& row = rows[{u.case_id, u.p}];
            row.p = u.p;
            row.counts.germain += c.counts.germain;
            row.counts.local += c.counts.local;
            row.counts.selmer += c.counts.selmer;
            row.counts.thue += c.counts.thue;
            break;
        }
        case UnitKind::lehmer:
            for (const auto& [p, lr] : c.lehmer) {
                LehmerRow& row = lrows[{u.case_id, p}];
                row.p = p;
                row.instances += lr.instances;
                row.solver_solutions += lr.solver_solutions;
                row.solutions += lr.solutions;
            }
            break;
        }
        thue_lines.insert(thue_lines.end(), c.thue.begin(), c.thue.end());
        v.unresolved.insert(v.unresolved.end(), c.unresolved.begin(), c.unresolved.end());
    }
    for (const auto& [k, row] : rows) {
        tables[k.first].sieve_rows.push_back(row);
        if (!row.external && row.counts.thue)
            v.delegated.push_back(describe_cell(k.first, k.second) + ": " + std::to_string(row.counts.thue) +
                                  " Thue instance(s) with no solution up to H = " + std::to_string(cfg.thue_H));
    }
    for (const auto& [k, row] : lrows) tables[k.first].lehmer_rows.push_back(row);
    for (auto& [id, t] : tables) result.tables.push_back(std::move(t));
    for (const auto& line : thue_lines) result.thue.push_back(parse_instance(line));

    v.only_trivial = v.unresolved.empty();
    std::ostringstream vt;
    std::vector<int> cs = cfg.cases;
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    vt << "cases:";
    for (int c : cs) vt << ' ' << c;
    vt << "\np: " << cfg.p_min << " .. " << (cfg.p_max ? std::to_string(*cfg.p_max) : std::string("Mignotte bound"))
       << "\nr: " << cfg.r_min << " .. " << cfg.r_max << "\n";
    if (v.only_trivial)
        vt << "verdict: only solutions with xy = 0";
    else
        vt << "verdict: NOT established";
    if (v.only_trivial && (!v.cited.empty() || !v.delegated.empty())) vt << ", subject to the items listed below";
    vt << "\n";
    if (!v.cited.empty()) {
        vt << "cited, not computed:\n";
        for (const auto& s : v.cited) vt << "  " << s << "\n";
    }
    if (!v.delegated.empty()) {
        vt << "delegated to a complete Thue solver (bounded search only):\n";
        for (const auto& s : v.delegated) vt << "  " << s << "\n";
    }
    if (!v.unresolved.empty()) {
        vt << "unresolved:\n";
        for (const auto& s : v.unresolved) vt << "  " << s << "\n";
    }
    v.text = vt.str();

    write_atomic(out / "records.jsonl", records);
    for (const auto& t : result.tables) write_atomic(out / ("case" + std::to_string(t.case_id) + "_table.csv"), t.csv());
    write_atomic(out / "verdict.txt", v.text);
    if (!cfg.thue_export.empty()) export_instances(result.thue, cfg.thue_export);
    return result;
}

RunResult resume(RunConfig config, const ProgressFn& progress)
{
    config.resume = true;
    return run(config, progress);
}

const char* witness_check_name(WitnessCheck c)
{
    switch (c) {
    case WitnessCheck::verified: return "verified";
    case WitnessCheck::skipped: return "skipped";
    case WitnessCheck::failed: return "failed";
    }
    return "?";
}

namespace {

// Does A X^n1 - B Y^n2 = C have a solution modulo M?
bool congruence_soluble(const mpz_class& A, const mpz_class& B, const mpz_class& C, u64 n1, u64 n2, u64 M)
{
    const u64 a = mpz_fdiv_ui(A.get_mpz_t(), M), b = mpz_fdiv_ui(B.get_mpz_t(), M),
              c = mpz_fdiv_ui(C.get_mpz_t(), M);
    std::vector<char> lhs(M, 0);
    for (u64 x = 0; x < M; ++x) lhs[mulmod(a, powmod(x, n1, M), M)] = 1;
    for (u64 y = 0; y < M; ++y)
        if (lhs[(c + mulmod(b, powmod(y, n2, M), M)) % M]) return true;
    return false;
}

}  // namespace

WitnessCheck verify_record(const EliminationRecord& rec, u64 k_max_selmer)
{
    if (rec.is_range()) return WitnessCheck::skipped;
    const u64 r = rec.r_lo, p = rec.p;
    const CaseTemplate& t = case_template(rec.case_id);
    auto ok = [](bool b) { return b ? WitnessCheck::verified : WitnessCheck::failed; };
    switch (rec.stage) {
    case Stage::germain: {
        if (rec.find("gcd_prime")) return ok(r % static_cast<u64>(rec.get_int("gcd_prime")) == 0);
        const u64 q = static_cast<u64>(rec.get_int("q"));
        const u64 c = mulmod(t.c0 % q, mulmod(r % q, r % q, q), q);
        return ok(b_set_is_empty(eval_mod(t.a, p, q), eval_mod(t.b, p, q), c, p, q));
    }
    case Stage::local: {
        const std::string reason = std::get<std::string>(*rec.find("reason"));
        const u64 q = static_cast<u64>(rec.get_int("q"));
        PrimeMap c = PrimeMap::of(t.c0);
        for (const auto& f : factor(r).factors) c.mul(f.prime, 2 * f.exp);
        const Reduction red = reduce_coprime(PrimeMap::of(t.a, p), PrimeMap::of(t.b, p), c, p);
        if (reason == "reduction") return ok(red.contradiction && red.witness_prime == q);
        if (red.contradiction) return WitnessCheck::failed;
        const CoprimeForm& f = red.form;
        if (reason == "quadratic-residue") {
            if (!f.A.divisible_by(q) || q == 2) return WitnessCheck::failed;
            const mpz_class bc = f.B.value() * f.C.value();
            return ok(jacobi(mpz_class(-bc), q) == -1);
        }
        const i64 e = rec.get_int("e");
        u64 M = 1;
        for (i64 i = 0; i < e; ++i) {
            if (M > 1000000 / q) return WitnessCheck::skipped;
            M *= q;
        }
        return ok(!congruence_soluble(f.A.value(), f.B.value(), f.C.value(), p, p, M));
    }
    case Stage::selmer: {
        PrimeMap c = PrimeMap::of(t.c0);
        for (const auto& f : factor(r).factors) c.mul(f.prime, 2 * f.exp);
        const Reduction red = reduce_coprime(PrimeMap::of(t.a, p), PrimeMap::of(t.b, p), c, p);
        if (red.contradiction) return WitnessCheck::failed;
        DescentEngine eng(p, k_max_selmer);
        if (rec.find("killed_local")) return WitnessCheck::skipped;
        return ok(eng.run(red.form).eliminated);
    }
    case Stage::lehmer: {
        if (rec.find("gcd_prime")) return ok(r % static_cast<u64>(rec.get_int("gcd_prime")) == 0);
        const WitnessValue* rej = rec.find("rejected");
        // an empty list parses as an integer array; nothing to re-derive either way
        if (!rej || !std::holds_alternative<std::vector<std::string>>(*rej)) return WitnessCheck::skipped;
        const u64 C1 = rec.case_id == 8 || rec.case_id == 10 ? 3 : 1;
        const u64 scale = rec.case_id == 7 ? 12 : rec.case_id == 8 ? 4 : rec.case_id == 9 ? 3 : 1;
        const u64 mult = rec.case_id == 7 ? 1 : rec.case_id == 8 ? 3 : rec.case_id == 9 ? 2 : 6;
        for (const auto& item : std::get<std::vector<std::string>>(*rej)) {
            const auto a = item.find(':'), b = item.rfind(':');
            const u64 pp = std::stoull(item.substr(0, a));
            const mpz_class x(item.substr(a + 1, b - a - 1)), w2(item.substr(b + 1));
            if (x % mult != 0) return WitnessCheck::failed;
            const mpz_class X = x / mult;
            mpz_class wp;
            mpz_pow_ui(wp.get_mpz_t(), w2.get_mpz_t(), pp);
            if (C1 * X * X + mpz_class(static_cast<unsigned long>(scale)) * r * r != wp) return WitnessCheck::failed;
            const mpz_class coef = t.x_coef.eval(pp);
            if (x % coef == 0 && exact_root(x / coef, pp)) return WitnessCheck::failed;
        }
        return WitnessCheck::verified;
    }
    case Stage::even_case: {
        const EvenCaseCertificate cert = eliminate_even_case(t);
        for (u64 q = 5; q < 200; q = next_prime(q))
            if (!cert.verify(q)) return WitnessCheck::failed;
        return WitnessCheck::verified;
    }
    default: return WitnessCheck::skipped;
    }
}

int exit_code(const RunResult& r) { return r.verdict.only_trivial ? 0 : 1; }

}  // namespace apsieve
