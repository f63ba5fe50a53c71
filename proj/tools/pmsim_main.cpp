#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmsim/engine.hpp"
#include "pmsim/scenario.hpp"
#include "pmsim/svgplot.hpp"
#include "pmsim/sweep.hpp"
#include "pmsim/textio.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;  // parse/validation errors, bad arguments
constexpr int kExitSim = 2;     // simulation failure (non-finite signal)
constexpr int kExitIo = 3;      // output write failure

struct SourceOpts {
    std::string paper_id;
    std::string file;
};

void add_source_opts(CLI::App* cmd, SourceOpts& src) {
    cmd->add_option("--paper-scenario", src.paper_id,
                    "built-in scenario id: posture | posture_ext_perturb | pm_no_apa | pm_apa");
    cmd->add_option("--scenario", src.file, "scenario file path");
}

// Loads the scenario from exactly one of the two sources and applies --set
// overrides. Prints the reason and exits with kExitConfig on any problem.
pmsim::SimConfig load_config(const SourceOpts& src, const std::vector<std::string>& sets) {
    if (src.paper_id.empty() == src.file.empty()) {
        std::fprintf(stderr,
                     "error: exactly one of --paper-scenario and --scenario is required\n");
        std::exit(kExitConfig);
    }
    try {
        pmsim::SimConfig cfg;
        if (!src.paper_id.empty()) {
            cfg = pmsim::paper_scenario_config(src.paper_id);
        } else {
            std::ifstream f(src.file, std::ios::binary);
            if (!f) {
                std::fprintf(stderr, "error: cannot open scenario file '%s'\n",
                             src.file.c_str());
                std::exit(kExitConfig);
            }
            std::ostringstream text;
            text << f.rdbuf();
            cfg = pmsim::parse_scenario(text.str());
        }
        for (const std::string& s : sets) pmsim::apply_override(cfg, s);
        return cfg;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        std::exit(kExitConfig);
    }
}

void write_or_die(const std::string& path, const std::string& content) {
    if (!pmsim::write_file(path, content)) {
        std::fprintf(stderr, "error: cannot write '%s'\n", path.c_str());
        std::exit(kExitIo);
    }
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::string cur;
    std::istringstream in(csv);
    while (std::getline(in, cur, ',')) {
        if (cur.empty()) continue;
        out.push_back(pmsim::parse_double(cur));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"posture/movement dual-loop control simulator"};
    app.require_subcommand(1);

    SourceOpts run_src, sweep_src;
    std::vector<std::string> run_sets, sweep_sets;
    std::string run_out, run_metrics, run_plot;
    std::string validate_path;
    std::string sweep_param, sweep_values, sweep_out;
    bool sweep_serial_flag = false;

    CLI::App* run = app.add_subcommand("run", "simulate a scenario and write the trace");
    add_source_opts(run, run_src);
    run->add_option("--out", run_out, "trace CSV output path");
    run->add_option("--metrics", run_metrics, "metrics key=value output path");
    run->add_option("--plot", run_plot, "SVG plot output path");
    run->add_option("--set", run_sets, "override, <param>=<value> (repeatable)");

    CLI::App* validate = app.add_subcommand(
        "validate", "parse and validate a scenario file, print its canonical form");
    validate->add_option("--scenario", validate_path, "scenario file path")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "run one simulation per parameter value");
    add_source_opts(sweep, sweep_src);
    sweep->add_option("--param", sweep_param, "numeric parameter path")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep->add_option("--out", sweep_out, "metrics CSV output path")->required();
    sweep->add_option("--set", sweep_sets, "override applied before the sweep (repeatable)");
    sweep->add_flag("--serial", sweep_serial_flag, "force the serial reference runner");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the message or requested help text
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) {
        if (run_out.empty() && run_metrics.empty() && run_plot.empty()) {
            std::fprintf(stderr,
                         "error: nothing to do; pass --out, --metrics and/or --plot\n");
            return kExitConfig;
        }
        const pmsim::SimConfig cfg = load_config(run_src, run_sets);
        try {
            const pmsim::Trace tr = pmsim::simulate(cfg);
            if (!run_out.empty()) write_or_die(run_out, pmsim::trace_to_csv(tr));
            if (!run_metrics.empty()) {
                const pmsim::Metrics m = pmsim::compute_metrics(tr, cfg);
                write_or_die(run_metrics, pmsim::metrics_to_text(m));
            }
            if (!run_plot.empty()) write_or_die(run_plot, pmsim::trace_to_svg(tr));
        } catch (const pmsim::SimulationError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitSim;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitConfig;
        }
        return kExitOk;
    }

    if (validate->parsed()) {
        std::ifstream f(validate_path, std::ios::binary);
        if (!f) {
            std::fprintf(stderr, "error: cannot open scenario file '%s'\n",
                         validate_path.c_str());
            return kExitConfig;
        }
        std::ostringstream text;
        text << f.rdbuf();
        try {
            const pmsim::SimConfig cfg = pmsim::parse_scenario(text.str());
            for (const std::string& w : cfg.warnings)
                std::printf("# warning: %s\n", w.c_str());
            std::fputs(pmsim::serialize_scenario(cfg).c_str(), stdout);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitConfig;
        }
        return kExitOk;
    }

    // sweep
    const pmsim::SimConfig base = load_config(sweep_src, sweep_sets);
    std::vector<double> values;
    try {
        values = parse_values(sweep_values);
        if (values.empty()) {
            std::fprintf(stderr, "error: --values list is empty\n");
            return kExitConfig;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    try {
        const auto rows = sweep_serial_flag ? pmsim::sweep_serial(base, sweep_param, values)
                                            : pmsim::sweep_parallel(base, sweep_param, values);
        write_or_die(sweep_out, pmsim::sweep_to_csv(rows));
    } catch (const pmsim::SimulationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSim;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitOk;
}
