#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wacukf/cli.hpp"

namespace {

std::optional<std::pair<std::uint64_t, std::uint64_t>> parse_seed_range(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const std::size_t dots = text.find("..");
    if (dots == std::string::npos)
        throw CLI::ValidationError("--seeds", "expected a range like 0..19");
    try {
        const std::uint64_t a = std::stoull(text.substr(0, dots));
        const std::uint64_t b = std::stoull(text.substr(dots + 2));
        return std::make_pair(a, b);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--seeds", "expected a range like 0..19");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed weighted-average-consensus UKF simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, seed_range;
    std::vector<std::string> overrides;

    CLI::App* run = app.add_subcommand("run", "run a scenario and write trace.csv + metrics.json");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory (default: $WACUKF_OUT_DIR or .)");
    run->add_option("--set", overrides, "override a scenario key, e.g. --set rng_seed=7");
    run->add_option("--seeds", seed_range, "run a seed range a..b, one subdirectory per seed");

    CLI::App* compare = app.add_subcommand(
        "compare", "run centralized / consensus / isolated filters on identical noise");
    compare->add_option("scenario", scenario_path, "scenario file")->required();
    compare->add_option("--out", out_dir, "output directory (default: $WACUKF_OUT_DIR or .)");
    compare->add_option("--set", overrides, "override a scenario key");

    CLI::App* validate = app.add_subcommand("validate", "static scenario validation");
    validate->add_option("scenario", scenario_path, "scenario file")->required();
    validate->add_option("--set", overrides, "override a scenario key");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return wacukf::cli::cmd_run(scenario_path, out_dir, overrides,
                                    parse_seed_range(seed_range));
    if (compare->parsed()) return wacukf::cli::cmd_compare(scenario_path, out_dir, overrides);
    return wacukf::cli::cmd_validate(scenario_path, overrides);
}
