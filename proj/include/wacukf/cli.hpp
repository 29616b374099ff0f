#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wacukf/scenario_io.hpp"
#include "wacukf/trace_csv.hpp"

namespace wacukf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

namespace detail {

inline std::filesystem::path resolve_out_dir(const std::string& out_dir) {
    if (!out_dir.empty()) return out_dir;
    if (const char* env = std::getenv("WACUKF_OUT_DIR"); env && *env) return env;
    return ".";
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

inline nlohmann::json metrics_to_json(const simnet::Scenario& s,
                                      const simnet::MetricsSummary& m) {
    nlohmann::json j;
    j["scenario"] = s.name;
    j["nodes"] = m.rmse.rows();
    nlohmann::json rmse = nlohmann::json::array();
    for (Index i = 0; i < m.rmse.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index c = 0; c < m.rmse.cols(); ++c) row.push_back(m.rmse(i, c));
        rmse.push_back(row);
    }
    j["rmse"] = rmse;
    j["max_abs_error"] = std::vector<double>(m.max_abs_error.data(),
                                             m.max_abs_error.data() + m.max_abs_error.size());
    j["max_error_norm"] = std::vector<double>(m.max_error_norm.data(),
                                              m.max_error_norm.data() + m.max_error_norm.size());
    j["settled"] = m.settled;
    if (m.settled) j["settling_time_s"] = m.settling_time;
    else j["settling_time_s"] = nullptr;
    j["steady_state_error"] = m.steady_state_error;
    if (s.error_bound > 0.0) {
        j["error_bound"] = s.error_bound;
        j["error_bound_satisfied"] = (m.max_error_norm.array() <= s.error_bound).all();
    }
    return j;
}

inline void print_rmse_table(std::ostream& out, const simnet::CompiledScenario& cs,
                             const simnet::MetricsSummary& m) {
    out << "per-node RMSE\n";
    out << "node";
    for (const auto& sname : cs.plant.state_names) out << "  " << sname;
    out << "\n";
    for (Index i = 0; i < m.rmse.rows(); ++i) {
        out << "  " << (i + 1);
        for (Index c = 0; c < m.rmse.cols(); ++c) out << "  " << m.rmse(i, c);
        out << "\n";
    }
    if (m.settled) out << "settling_time_s: " << m.settling_time << "\n";
    else out << "settling_time_s: not settled\n";
    out << "steady_state_error: " << m.steady_state_error << "\n";
}

inline int run_one(const simnet::Scenario& s, const std::filesystem::path& dir, std::ostream& out,
                   std::ostream& err) {
    try {
        const simnet::CompiledScenario cs = simnet::compile(s);
        const simnet::detail::NoiseBank noise = simnet::detail::draw_noise(cs, s.rng_seed);
        const simnet::RunResult result =
            simnet::detail::run_compiled(cs, noise, simnet::detail::FilterArm::consensus);
        std::filesystem::create_directories(dir);
        write_file(dir / "trace.csv", trace_to_csv(cs, result.trace));
        write_file(dir / "metrics.json", metrics_to_json(s, result.metrics).dump(2) + "\n");
        print_rmse_table(out, cs, result.metrics);
        return kExitOk;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace detail

/// `run <scenario> [--out DIR] [--set k=v ...] [--seeds a..b]`
inline int cmd_run(const std::string& scenario_path, const std::string& out_dir,
                   const std::vector<std::string>& overrides,
                   const std::optional<std::pair<std::uint64_t, std::uint64_t>>& seeds = {},
                   std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    simnet::Scenario scenario;
    try {
        scenario = load_scenario(scenario_path, overrides);
        simnet::validate(scenario);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    const std::filesystem::path base = detail::resolve_out_dir(out_dir);

    try {
        if (!seeds) return detail::run_one(scenario, base, out, err);

        // Seed fan-out: independent runs, one subdirectory per seed.
        if (seeds->second < seeds->first) {
            err << "error: --seeds range must be ascending\n";
            return kExitValidation;
        }
        std::vector<std::future<std::pair<int, std::string>>> jobs;
        for (std::uint64_t seed = seeds->first; seed <= seeds->second; ++seed) {
            simnet::Scenario variant = scenario;
            variant.rng_seed = seed;
            jobs.push_back(std::async(std::launch::async, [variant, base, seed]() {
                std::ostringstream local_out, local_err;
                const int code = detail::run_one(variant, base / ("seed_" + std::to_string(seed)),
                                                 local_out, local_err);
                return std::make_pair(code, "== seed " + std::to_string(seed) + "\n" +
                                                local_out.str() + local_err.str());
            }));
        }
        int worst = kExitOk;
        for (auto& job : jobs) {
            auto [code, text] = job.get();
            out << text;
            worst = std::max(worst, code);
        }
        return worst;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

/// `compare <scenario> [--out DIR] [--set k=v ...]`: centralized vs consensus
/// vs isolated filtering on identical noise realizations.
inline int cmd_compare(const std::string& scenario_path, const std::string& out_dir,
                       const std::vector<std::string>& overrides = {},
                       std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    simnet::Scenario scenario;
    try {
        scenario = load_scenario(scenario_path, overrides);
        simnet::validate(scenario);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    try {
        const simnet::CompiledScenario cs = simnet::compile(scenario);
        const simnet::ComparisonReport report = simnet::compare_centralized(scenario);
        const std::filesystem::path dir = detail::resolve_out_dir(out_dir);
        std::filesystem::create_directories(dir);
        detail::write_file(dir / "trace_centralized.csv", trace_to_csv(cs, report.centralized.trace));
        detail::write_file(dir / "trace_consensus.csv", trace_to_csv(cs, report.consensus.trace));
        detail::write_file(dir / "trace_isolated.csv", trace_to_csv(cs, report.isolated.trace));

        nlohmann::json j;
        j["scenario"] = scenario.name;
        j["centralized_rmse"] = report.centralized_rmse;
        j["consensus_rmse"] = std::vector<double>(
            report.consensus_rmse.data(), report.consensus_rmse.data() + report.consensus_rmse.size());
        j["isolated_rmse"] = std::vector<double>(
            report.isolated_rmse.data(), report.isolated_rmse.data() + report.isolated_rmse.size());
        j["ratio_vs_centralized"] =
            std::vector<double>(report.ratio_vs_centralized.data(),
                                report.ratio_vs_centralized.data() + report.ratio_vs_centralized.size());
        j["ratio_vs_isolated"] =
            std::vector<double>(report.ratio_vs_isolated.data(),
                                report.ratio_vs_isolated.data() + report.ratio_vs_isolated.size());
        detail::write_file(dir / "compare.json", j.dump(2) + "\n");

        out << "node  rmse_consensus  rmse_isolated  vs_centralized  vs_isolated\n";
        for (Index i = 0; i < report.consensus_rmse.size(); ++i)
            out << "  " << (i + 1) << "  " << report.consensus_rmse(i) << "  "
                << report.isolated_rmse(i) << "  " << report.ratio_vs_centralized(i) << "  "
                << report.ratio_vs_isolated(i) << "\n";
        out << "centralized rmse: " << report.centralized_rmse << "\n";
        return kExitOk;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

/// `validate <scenario> [--set k=v ...]`: full static validation including the
/// network primitivity report and Perron vector.
inline int cmd_validate(const std::string& scenario_path,
                        const std::vector<std::string>& overrides = {},
                        std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        const simnet::Scenario scenario = load_scenario(scenario_path, overrides);
        simnet::validate(scenario);
        const simnet::CompiledScenario cs = simnet::compile(scenario);
        out << "scenario: " << (scenario.name.empty() ? scenario_path : scenario.name) << "\n";
        out << "plant states: " << cs.plant.num_states() << ", nodes: " << cs.net.num_nodes
            << ", steps: " << cs.steps << "\n";
        out << "network: primitive (Pi^" << cs.net_report.witness_power << " > 0)\n";
        out << "perron vector:";
        for (Index i = 0; i < cs.net_report.perron.size(); ++i)
            out << " " << cs.net_report.perron(i);
        out << "\n";
        out << "ok\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

} // namespace wacukf::cli
