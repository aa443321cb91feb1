#include "apsieve/thue.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>
#include <stdexcept>

namespace apsieve {

ThueInstance thue_instance(const TernaryInstance& inst)
{
    return {inst.a_value(), inst.b_value(), inst.c, inst.p, inst.case_id, inst.r};
}

std::vector<ThueSolution> bounded_search(const ThueInstance& inst, u64 H, bool tau_square)
{
    std::vector<ThueSolution> out;
    if (inst.a == 0 || inst.p == 0) return out;
    const mpz_class Hz = static_cast<unsigned long>(H);
    auto try_tau = [&](const mpz_class& tau) {
        mpz_class tp;
        mpz_pow_ui(tp.get_mpz_t(), tau.get_mpz_t(), inst.p);
        mpz_class num = inst.rhs + inst.b * tp;
        if (num % inst.a != 0) return;
        mpz_class q = num / inst.a;
        if (inst.p % 2 == 0 && q < 0) return;
        auto s = exact_root(q, inst.p);
        if (!s) return;
        if (abs(*s) <= Hz) out.push_back({*s, tau});
        if (inst.p % 2 == 0 && *s != 0 && abs(*s) <= Hz) out.push_back({-*s, tau});
    };
    if (tau_square) {
        for (u64 w = 0; w * w <= H; ++w) try_tau(mpz_class(static_cast<unsigned long>(w * w)));
    } else {
        for (mpz_class tau = -Hz; tau <= Hz; ++tau) try_tau(tau);
    }
    std::sort(out.begin(), out.end(), [](const ThueSolution& x, const ThueSolution& y) {
        return x.tau != y.tau ? x.tau < y.tau : x.sigma < y.sigma;
    });
    return out;
}

std::string format_instance(const ThueInstance& inst)
{
    std::ostringstream os;
    os << inst.case_id << ' ' << inst.p << ' ' << inst.r << ' ' << inst.a.get_str() << ' ' << inst.b.get_str() << ' '
       << inst.rhs.get_str();
    return os.str();
}

ThueInstance parse_instance(const std::string& line)
{
    std::istringstream is(line);
    ThueInstance t;
    std::string a, b, rhs, extra;
    if (!(is >> t.case_id >> t.p >> t.r >> a >> b >> rhs) || (is >> extra))
        throw std::invalid_argument("malformed thue instance line: " + line);
    if (t.a.set_str(a, 10) || t.b.set_str(b, 10) || t.rhs.set_str(rhs, 10))
        throw std::invalid_argument("malformed integer in thue instance line: " + line);
    return t;
}

void export_instances(std::vector<ThueInstance> list, const std::string& path)
{
    std::sort(list.begin(), list.end(), [](const ThueInstance& x, const ThueInstance& y) {
        return std::tie(x.case_id, x.p, x.r) < std::tie(y.case_id, y.p, y.r);
    });
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path);
    for (const auto& t : list) os << format_instance(t) << '\n';
    if (!os) throw std::runtime_error("write failed: " + path);
}

std::vector<ThueInstance> import_instances(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::vector<ThueInstance> out;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) out.push_back(parse_instance(line));
    return out;
}

}  // namespace apsieve
