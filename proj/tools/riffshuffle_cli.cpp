// riffshuffle: evaluate, analyze, sample, and verify the riff-shuffle
// (minimum negative binomial) distribution from the command line.
//
// Exit codes: 0 success, 1 usage/domain error, 2 a check or verify run
// detected a property violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "riffshuffle/analysis.hpp"
#include "riffshuffle/distribution.hpp"
#include "riffshuffle/exact.hpp"
#include "riffshuffle/sampler.hpp"
#include "riffshuffle/verify.hpp"

namespace rs = riffshuffle;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t default_seed = 12345;

// Probability argument: "a/b" engages the exact paths, a decimal stays in
// floating point. A decimal is never silently promoted to a rational.
struct probability {
    bool is_exact = false;
    double value = 0.0;
    rs::exact::rational rat;
    std::string raw;
};

probability parse_p(const std::string& raw) {
    probability out;
    out.raw = raw;
    if (raw.find('/') != std::string::npos) {
        out.is_exact = true;
        out.rat = rs::exact::parse_rational(raw);
        if (out.rat <= 0 || out.rat >= 1) {
            throw std::domain_error("p must lie strictly between 0 and 1, got " + raw);
        }
        out.value = rs::exact::to_double(out.rat);
        return out;
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(raw, &pos);
    } catch (const std::exception&) {
        throw std::domain_error("could not parse probability \"" + raw + "\"");
    }
    if (pos != raw.size()) throw std::domain_error("could not parse probability \"" + raw + "\"");
    out.value = v;
    return out;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ordered_json p_json(const probability& p) {
    if (p.is_exact) return rs::exact::to_fraction_string(p.rat);
    return p.value;
}

void emit(const ordered_json& doc) { std::cout << doc.dump(2) << "\n"; }

std::uint64_t resolve_seed(const CLI::App* cmd, std::uint64_t cli_seed) {
    if (cmd->count("--seed") > 0) return cli_seed;
    if (const char* env = std::getenv("RIFFSHUFFLE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::domain_error("RIFFSHUFFLE_SEED is not an unsigned integer: " +
                                    std::string(env));
        }
    }
    return default_seed;
}

// ---- pmf ----------------------------------------------------------------

int run_pmf(const probability& p, int m, const std::string& format) {
    if (p.is_exact) {
        const rs::exact::exact_params ep(p.rat, m);
        const auto table = rs::exact::pmf_table(ep);
        std::vector<rs::exact::rational> cum(table.mass.size());
        rs::exact::rational acc = 0;
        for (size_t k = 0; k < table.mass.size(); ++k) {
            acc += table.mass[k];
            cum[k] = acc;
        }
        if (format == "csv") {
            std::cout << "k,pmf,cdf\n";
            for (size_t k = 0; k < table.mass.size(); ++k) {
                std::cout << k << "," << rs::exact::to_fraction_string(table.mass[k]) << ","
                          << rs::exact::to_fraction_string(cum[k]) << "\n";
            }
        } else {
            ordered_json doc;
            doc["command"] = "pmf";
            doc["p"] = p_json(p);
            doc["m"] = m;
            doc["exact"] = true;
            auto& pm = doc["pmf"] = ordered_json::array();
            auto& cd = doc["cdf"] = ordered_json::array();
            for (size_t k = 0; k < table.mass.size(); ++k) {
                pm.push_back(rs::exact::to_fraction_string(table.mass[k]));
                cd.push_back(rs::exact::to_fraction_string(cum[k]));
            }
            emit(doc);
        }
        return 0;
    }

    const rs::params par(p.value, m);
    const auto table = rs::make_pmf_table(par);
    if (format == "csv") {
        std::cout << "k,pmf,cdf\n";
        for (size_t k = 0; k < table.mass.size(); ++k) {
            std::cout << k << "," << fmt17(table.mass[k]) << "," << fmt17(table.cumulative[k])
                      << "\n";
        }
    } else {
        ordered_json doc;
        doc["command"] = "pmf";
        doc["p"] = p_json(p);
        doc["m"] = m;
        doc["exact"] = false;
        doc["pmf"] = table.mass;
        doc["cdf"] = table.cumulative;
        emit(doc);
    }
    return 0;
}

// ---- mode ---------------------------------------------------------------

int run_mode(const probability& p, int m, const std::string& format) {
    std::vector<int> modes;
    std::optional<int> first_descent;
    if (p.is_exact) {
        const rs::exact::exact_params ep(p.rat, m);
        modes = rs::exact::mode_set(ep);
        if (!(modes.size() == 1 && modes.front() == m - 1)) first_descent = modes.front();
    } else {
        const auto res = rs::mode(rs::params(p.value, m));
        modes = res.modes;
        first_descent = res.first_descent;
    }

    if (format == "csv") {
        std::cout << "modes,first_descent\n";
        for (size_t i = 0; i < modes.size(); ++i) std::cout << (i ? " " : "") << modes[i];
        std::cout << ",";
        if (first_descent) std::cout << *first_descent;
        std::cout << "\n";
    } else {
        ordered_json doc;
        doc["command"] = "mode";
        doc["p"] = p_json(p);
        doc["m"] = m;
        doc["exact"] = p.is_exact;
        doc["modes"] = modes;
        if (first_descent) {
            doc["first_descent"] = *first_descent;
        } else {
            doc["first_descent"] = nullptr;
        }
        emit(doc);
    }
    return 0;
}

// ---- check ----------------------------------------------------------------

// Floating-point log-concavity scan over the extended mass sequence; the
// authoritative variant is the exact one, engaged by a rational p.
std::optional<int> float_log_concavity_scan(const rs::params& par, bool extended) {
    const int k_hi = extended ? par.m - 1 : par.m - 2;
    std::vector<double> lm(static_cast<size_t>(k_hi) + 2);
    for (int k = 0; k <= k_hi + 1; ++k) lm[size_t(k)] = rs::detail::log_mass(par, k);
    for (int k = 1; k <= k_hi; ++k) {
        if (2.0 * lm[size_t(k)] < lm[size_t(k) - 1] + lm[size_t(k) + 1]) return k;
    }
    return std::nullopt;
}

int run_check(const probability& p, int m, bool extended, const std::string& format) {
    if (extended ? m < 2 : m < 3) {
        throw std::domain_error(extended ? "check: the extended scan requires m >= 2"
                                         : "check: the in-support scan requires m >= 3");
    }

    const rs::params par(p.value, m);
    std::optional<int> first_violation;
    rs::shape_report shape{};
    if (p.is_exact) {
        const rs::exact::exact_params ep(p.rat, m);
        first_violation = rs::exact::log_concavity_scan(ep, extended).first_violation;
        shape = rs::exact::unimodality_check(ep);
    } else {
        first_violation = float_log_concavity_scan(par, extended);
        shape = rs::check_shape(par);
    }

    bool concave = true;
    double max_d2 = 0.0;
    if (m >= 2) {
        const auto rep = rs::analysis::check_g_concavity(par, 100);
        concave = rep.is_concave;
        max_d2 = rep.max_second_difference;
    }
    std::optional<rs::analysis::boundary_sides> sides;
    if (m >= 2) sides = rs::analysis::log_concavity_boundary_sides(par);

    const int violations =
        int(first_violation.has_value()) + int(!shape.is_unimodal) + int(!concave);

    if (format == "csv") {
        std::cout << "check,status,detail\n";
        std::cout << "log_concavity," << (first_violation ? "violation" : "ok") << ",";
        if (first_violation) std::cout << "k=" << *first_violation;
        std::cout << "\n";
        std::cout << "unimodality," << (shape.is_unimodal ? "ok" : "violation") << ",modes=";
        for (size_t i = 0; i < shape.modes.size(); ++i)
            std::cout << (i ? " " : "") << shape.modes[i];
        std::cout << "\n";
        if (m >= 2) {
            std::cout << "g_concavity," << (concave ? "ok" : "violation")
                      << ",max_second_difference=" << fmt17(max_d2) << "\n";
            std::cout << "boundary_inequality," << (sides->holds ? "holds" : "fails")
                      << ",lhs=" << fmt17(sides->lhs) << " rhs=" << fmt17(sides->rhs) << "\n";
        }
    } else {
        ordered_json doc;
        doc["command"] = "check";
        doc["p"] = p_json(p);
        doc["m"] = m;
        doc["exact"] = p.is_exact;
        doc["extended"] = extended;
        ordered_json lc;
        lc["checked_range"] = {1, extended ? m - 1 : m - 2};
        lc["used_extended"] = extended;
        lc["first_violation"] = first_violation ? ordered_json(*first_violation) : nullptr;
        doc["log_concavity"] = lc;
        ordered_json um;
        um["is_unimodal"] = shape.is_unimodal;
        um["modes"] = shape.modes;
        um["ascent_end"] = shape.ascent_end;
        um["descent_start"] = shape.descent_start;
        doc["unimodality"] = um;
        if (m >= 2) {
            ordered_json gc;
            gc["is_concave"] = concave;
            gc["max_second_difference"] = max_d2;
            doc["g_concavity"] = gc;
            ordered_json bs;
            bs["lhs"] = sides->lhs;
            bs["rhs"] = sides->rhs;
            bs["holds"] = sides->holds;
            doc["boundary_inequality"] = bs;
        }
        doc["violations"] = violations;
        emit(doc);
    }
    return violations > 0 ? 2 : 0;
}

// ---- scan -----------------------------------------------------------------

int run_scan(const probability& p, int m_max, bool extended, const std::string& format) {
    if (!p.is_exact) {
        throw std::domain_error(
            "scan: requires an exact rational p (\"a/b\"); a decimal is not promoted");
    }
    std::optional<int> first_m;
    std::optional<int> violation_k;
    if (extended) {
        first_m = rs::analysis::min_m_extended_violation(p.rat, m_max);
        if (first_m) violation_k = *first_m - 1;
    } else {
        for (int m = 3; m <= m_max; ++m) {
            const auto rep = rs::exact::log_concavity_scan(rs::exact::exact_params(p.rat, m), false);
            if (rep.first_violation) {
                first_m = m;
                violation_k = *rep.first_violation;
                break;
            }
        }
    }

    if (format == "csv") {
        std::cout << "p,m_max,extended,first_violating_m,violation_k\n";
        std::cout << p.raw << "," << m_max << "," << (extended ? "true" : "false") << ",";
        if (first_m) std::cout << *first_m;
        std::cout << ",";
        if (violation_k) std::cout << *violation_k;
        std::cout << "\n";
    } else {
        ordered_json doc;
        doc["command"] = "scan";
        doc["p"] = p_json(p);
        doc["m_max"] = m_max;
        doc["extended"] = extended;
        doc["first_violating_m"] = first_m ? ordered_json(*first_m) : nullptr;
        doc["violation_k"] = violation_k ? ordered_json(*violation_k) : nullptr;
        emit(doc);
    }
    return 0;
}

// ---- sample ---------------------------------------------------------------

int run_sample(const probability& p, int m, std::int64_t n, std::uint64_t seed,
               const std::string& mech_name, const std::string& format) {
    const rs::params par(p.value, m);
    const rs::mechanism mech =
        mech_name == "trials" ? rs::mechanism::trials : rs::mechanism::deck;
    const auto summary = rs::empirical_pmf(par, n, seed, mech);

    // reference pmf: exact when p came in as a rational
    std::vector<double> expected;
    if (p.is_exact) {
        for (const auto& f : rs::exact::masses_up_to(rs::exact::exact_params(p.rat, m), m)) {
            expected.push_back(rs::exact::to_double(f));
        }
    } else {
        expected = rs::make_pmf_table(par).mass;
    }
    const auto gof = rs::gof_statistics(summary, expected);

    if (format == "csv") {
        std::cout << "k,count,empirical,expected\n";
        for (int k = 0; k < m; ++k) {
            std::cout << k << "," << summary.counts[size_t(k)] << ","
                      << fmt17(double(summary.counts[size_t(k)]) / double(n)) << ","
                      << fmt17(expected[size_t(k)]) << "\n";
        }
    } else {
        ordered_json doc;
        doc["command"] = "sample";
        doc["p"] = p_json(p);
        doc["m"] = m;
        doc["n"] = n;
        doc["seed"] = seed;
        doc["mechanism"] = mech_name;
        doc["exact_reference"] = p.is_exact;
        doc["counts"] = summary.counts;
        doc["tv_distance"] = gof.tv_distance;
        doc["chi_square"] = gof.chi_square;
        doc["degrees_of_freedom"] = m - 1;
        if (m >= 2) doc["chi_square_critical_999"] = rs::chi_square_critical_999(m - 1);
        emit(doc);
    }
    return 0;
}

// ---- verify ---------------------------------------------------------------

int run_verify(bool quick, const std::string& format) {
    const auto results = rs::verify::run_all({quick});
    bool all = true;
    if (format == "csv") {
        std::cout << "id,name,status\n";
        for (const auto& r : results) {
            std::cout << r.id << "," << r.name << "," << (r.passed ? "pass" : "fail") << "\n";
            all = all && r.passed;
        }
    } else {
        ordered_json doc;
        doc["command"] = "verify";
        doc["quick"] = quick;
        auto& arr = doc["criteria"] = ordered_json::array();
        for (const auto& r : results) {
            ordered_json c;
            c["id"] = r.id;
            c["name"] = r.name;
            c["passed"] = r.passed;
            c["detail"] = r.detail;
            arr.push_back(c);
            all = all && r.passed;
        }
        doc["all_passed"] = all;
        emit(doc);
    }
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"riff-shuffle (minimum negative binomial) distribution toolkit"};
    app.require_subcommand(1);

    std::string p_raw;
    std::string format = "csv";
    std::string mech_name = "deck";
    int m = 1;
    int m_max = 200;
    std::int64_t n = 10000;
    std::uint64_t seed = default_seed;
    bool extended = false;
    bool exact_flag = false;
    bool quick = false;

    const auto add_common = [&](CLI::App* cmd, bool needs_m) {
        cmd->add_option("--p", p_raw, "probability p: decimal or exact fraction \"a/b\"")
            ->required();
        if (needs_m) cmd->add_option("--m", m, "deck size m (support is 0..m-1)")->required();
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_flag("--exact", exact_flag, "require the exact path (p must be \"a/b\")");
    };

    auto* pmf_cmd = app.add_subcommand("pmf", "print the pmf and cdf table");
    add_common(pmf_cmd, true);

    auto* mode_cmd = app.add_subcommand("mode", "mode set and first descent index");
    add_common(mode_cmd, true);

    auto* check_cmd = app.add_subcommand("check", "property checks for one (p, m)");
    add_common(check_cmd, true);
    check_cmd->add_flag("--extended", extended,
                        "include the k = m-1 log-concavity check at the extended index");

    auto* scan_cmd = app.add_subcommand("scan", "smallest m with a log-concavity violation");
    scan_cmd->add_option("--p", p_raw, "exact probability \"a/b\"")->required();
    scan_cmd->add_option("--m-max", m_max, "largest m to scan");
    scan_cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    scan_cmd->add_flag("--extended", extended, "scan the extended index k = m-1");
    scan_cmd->add_flag("--exact", exact_flag, "no-op; scan always runs exactly");

    auto* sample_cmd = app.add_subcommand("sample", "draw variates and report fit statistics");
    add_common(sample_cmd, true);
    sample_cmd->add_option("--n", n, "number of draws")->check(CLI::PositiveNumber);
    sample_cmd->add_option("--seed", seed, "generator seed (beats RIFFSHUFFLE_SEED)");
    sample_cmd->add_option("--mechanism", mech_name, "generative mechanism")
        ->check(CLI::IsMember({"deck", "trials"}));

    auto* verify_cmd = app.add_subcommand("verify", "run the full verification suite");
    verify_cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    verify_cmd->add_flag("--quick", quick, "reduced grids and sample sizes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (verify_cmd->parsed()) return run_verify(quick, format);

        const probability p = parse_p(p_raw);
        if (exact_flag && !p.is_exact) {
            throw std::domain_error(
                "--exact requires p as an exact fraction \"a/b\"; a decimal is not promoted");
        }
        if (scan_cmd->parsed()) return run_scan(p, m_max, extended, format);
        if (pmf_cmd->parsed()) return run_pmf(p, m, format);
        if (mode_cmd->parsed()) return run_mode(p, m, format);
        if (check_cmd->parsed()) return run_check(p, m, extended, format);
        if (sample_cmd->parsed()) {
            return run_sample(p, m, n, resolve_seed(sample_cmd, seed), mech_name, format);
        }
    } catch (const std::exception& e) {
        std::cerr << "riffshuffle: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
