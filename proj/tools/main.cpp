#include "optomech/config.hpp"
#include "optomech/drive_engineering.hpp"
#include "optomech/error.hpp"
#include "optomech/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#ifndef OPTOMECH_RECIPE_DIR
#define OPTOMECH_RECIPE_DIR "recipes"
#endif

namespace {

using nlohmann::json;
using namespace optomech;

std::filesystem::path recipe_dir() {
    if (const char* env = std::getenv("OPTOMECH_RECIPE_DIR"); env != nullptr && *env != '\0') return env;
    return OPTOMECH_RECIPE_DIR;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
    }
}

// A recipe is the base document; an explicit config is merged over it.
ExperimentConfig resolve(const std::string& config_path, const std::string& recipe) {
    if (config_path.empty() && recipe.empty()) throw Error(ErrorKind::InvalidConfig, "give --config or --recipe");
    json doc = json::object();
    if (!recipe.empty()) doc = read_json(recipe_dir() / (recipe + ".json"));
    if (!config_path.empty()) doc.merge_patch(read_json(config_path));
    return parse_config(doc);
}

void print_files(const RunResult& r) {
    for (const auto& f : r.files) std::cout << f.string() << '\n';
}

std::vector<double> parse_times(const std::string& list) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto end = std::min(list.find(',', pos), list.size());
        const std::string item = list.substr(pos, end - pos);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw Error(ErrorKind::InvalidConfig, "bad --times entry \"" + item + "\"");
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Driven hybrid optomechanics: first moments, fluctuations and diagnostics"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string recipe;
    std::string out_dir;
    unsigned jobs = 1;
    std::string times;

    auto* simulate = app.add_subcommand("simulate", "Run a configuration or recipe and write CSV outputs");
    simulate->add_option("--config", config_path, "Configuration JSON (merged over --recipe when both are given)");
    simulate->add_option("--recipe", recipe, "Named recipe from the recipe directory");
    simulate->add_option("--out", out_dir, "Output directory (default $OPTOMECH_OUT_DIR or ./out)");
    simulate->add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);

    auto* engineer = app.add_subcommand("engineer-drive", "Print the drive components for the engineered coupling");
    engineer->add_option("--config", config_path, "Configuration JSON")->required();

    auto* stability = app.add_subcommand("stability", "Print the stability report as JSON");
    stability->add_option("--config", config_path, "Configuration JSON")->required();

    auto* sweep = app.add_subcommand("sweep", "Evaluate the configured parameter grid");
    sweep->add_option("--config", config_path, "Configuration JSON")->required();
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* wigner = app.add_subcommand("wigner", "Write mechanical Wigner grids at the given times (units of tau)");
    wigner->add_option("--config", config_path, "Configuration JSON")->required();
    wigner->add_option("--times", times, "Comma-separated times in units of tau")->required();
    wigner->add_option("--out", out_dir, "Output directory");

    auto* compare = app.add_subcommand("compare", "Compare the integrated trajectory with the Floquet series");
    compare->add_option("--config", config_path, "Configuration JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            print_files(run_experiment(resolve(config_path, recipe), default_out_dir(out_dir), jobs));
        } else if (engineer->parsed()) {
            const ExperimentConfig cfg = resolve(config_path, "");
            if (!cfg.engineered) throw Error(ErrorKind::InvalidConfig, "engineer-drive needs an \"engineered\" block");
            std::cout << drive_to_json(modulation_components(cfg.params, *cfg.engineered)).dump(2) << '\n';
        } else if (stability->parsed()) {
            std::cout << to_json(check_stability(resolve(config_path, ""))).dump(2) << '\n';
        } else if (sweep->parsed()) {
            const ExperimentConfig cfg = resolve(config_path, "");
            if (cfg.sweep.empty()) throw Error(ErrorKind::InvalidConfig, "configuration has no sweep axes");
            print_files(run_experiment(cfg, default_out_dir(out_dir), jobs));
        } else if (wigner->parsed()) {
            ExperimentConfig cfg = resolve(config_path, "");
            cfg.sweep.clear();
            cfg.outputs = {Output::wigner};
            cfg.wigner_times = parse_times(times);
            cfg = parse_config(to_json(cfg));
            print_files(run_experiment(cfg, default_out_dir(out_dir)));
        } else if (compare->parsed()) {
            std::cout << to_json(compare_sources(resolve(config_path, ""))).dump(2) << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
