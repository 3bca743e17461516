#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geoint/errors.hpp"
#include "geoint/harness.hpp"

namespace {

constexpr int exit_validation = 2;
constexpr int exit_numerical = 3;

const std::vector<std::string> keys{"problem",  "integrator", "dt",         "eps_res", "t_final", "order", "pade_num",
                                    "pade_den", "quad_nodes", "stride",     "out",     "modes",   "forcing"};

void add_overrides(CLI::App& cmd, std::map<std::string, std::string>& values) {
    for (const std::string& k : keys) cmd.add_option("--" + k, values[k], "override " + k);
}

geoint::Scenario configured(const std::string& path, const std::map<std::string, std::string>& overrides) {
    geoint::Scenario s = geoint::load_scenario(path);
    for (const auto& [k, v] : overrides)
        if (!v.empty()) geoint::apply_setting(s, k, v);
    return s;
}

void print_summary(const geoint::RunRecord& rec) {
    const geoint::RunSummary s = rec.summary();
    std::printf("%s/%s steps=%zu mean_step=%.6e max_error=%.6e mean_error=%.6e final_error=%.6e cpu_ms=%.3f\n",
                rec.problem.c_str(), rec.integrator.c_str(), s.steps, s.mean_step, s.max_error, s.mean_error,
                s.final_error, static_cast<double>(s.cpu_ns) * 1e-6);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric and Borel-Pade-Laplace integrators: scenario runner"};
    app.require_subcommand(1);

    std::string run_config;
    std::map<std::string, std::string> run_overrides;
    CLI::App* run = app.add_subcommand("run", "run one scenario");
    run->add_option("config", run_config, "key=value scenario file")->required();
    add_overrides(*run, run_overrides);

    std::vector<std::string> compare_configs;
    CLI::App* cmp = app.add_subcommand("compare", "run scenarios on one problem and tabulate them");
    cmp->add_option("configs", compare_configs, "scenario files")->required();

    std::string sweep_config, sweep_param;
    std::vector<std::string> sweep_values;
    std::map<std::string, std::string> sweep_overrides;
    CLI::App* sweep = app.add_subcommand("sweep", "run a scenario for each value of one key");
    sweep->add_option("config", sweep_config, "key=value scenario file")->required();
    sweep->add_option("--param", sweep_param, "key to vary")->required();
    sweep->add_option("--values", sweep_values, "values to use")->required()->delimiter(',');
    add_overrides(*sweep, sweep_overrides);

    std::string plot_csv;
    CLI::App* plot = app.add_subcommand("plot", "write a gnuplot script for a recorded CSV");
    plot->add_option("record", plot_csv, "CSV written by run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_validation;
    }

    try {
        if (*run) {
            const geoint::RunRecord rec = geoint::run_scenario(configured(run_config, run_overrides));
            print_summary(rec);
        } else if (*cmp) {
            std::vector<geoint::RunRecord> recs;
            for (const std::string& c : compare_configs) recs.push_back(geoint::run_scenario(geoint::load_scenario(c)));
            std::fputs(geoint::format_comparison(geoint::compare(recs)).c_str(), stdout);
        } else if (*sweep) {
            std::vector<geoint::RunRecord> recs;
            for (const std::string& v : sweep_values) {
                geoint::Scenario s = configured(sweep_config, sweep_overrides);
                geoint::apply_setting(s, sweep_param, v);
                if (!s.out.empty()) {
                    std::filesystem::path out(s.out);
                    out.replace_filename(out.stem().string() + "_" + sweep_param + "=" + v + out.extension().string());
                    s.out = out.string();
                }
                recs.push_back(geoint::run_scenario(s));
                recs.back().integrator += " " + sweep_param + "=" + v;
                print_summary(recs.back());
            }
            if (recs.size() >= 2) std::fputs(geoint::format_comparison(geoint::compare(recs)).c_str(), stdout);
        } else if (*plot) {
            const geoint::RunRecord rec = geoint::read_csv(plot_csv);
            const auto script = geoint::emit_plot_scripts(rec, plot_csv);
            std::printf("%s\n", script.string().c_str());
        }
    } catch (const geoint::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return geoint::is_validation_error(e.kind()) ? exit_validation : exit_numerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_numerical;
    }
    return 0;
}
