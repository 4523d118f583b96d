#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spgp/harness.hpp"
#include "spgp/log.hpp"
#include "spgp/scenario.hpp"
#include "spgp/simulator.hpp"

namespace {

using spgp::EmitFormat;
using spgp::Method;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << content;
}

struct CommonFlags {
    std::string scenario = "doorway";
    int agents = 2;
    std::string method = "spgp";
    int trials = 10;
    std::uint64_t seed = 1;
    double delta = -1.0;   // <0: keep scenario default
    double gamma = -1.0;
    double dt = -1.0;
    int t_max = -1;
    std::string out;
    std::string format = "csv";
    int workers = 0;
    std::string scenario_file;
    std::vector<std::string> overrides;
    std::string dump_log;
    std::string plot;
};

std::map<std::string, double> parse_overrides(const std::vector<std::string>& kvs) {
    std::map<std::string, double> out;
    for (const std::string& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("override '" + kv + "' is not key=value");
        }
        out[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    return out;
}

spgp::ScenarioConfig make_config(const CommonFlags& f) {
    spgp::ScenarioConfig config;
    if (!f.scenario_file.empty()) {
        config = spgp::load_scenario(read_file(f.scenario_file));
    } else {
        config = spgp::build_scenario(f.scenario, f.agents, parse_overrides(f.overrides));
    }
    if (f.delta > 0.0) config.spgp.delta = f.delta;
    if (f.gamma > 0.0) config.safety.gamma = f.gamma;
    if (f.dt > 0.0) config.dt = f.dt;
    if (f.t_max > 0) config.t_max = f.t_max;
    spgp::validate(config);
    return config;
}

EmitFormat parse_format(const std::string& name) {
    if (name == "csv") return EmitFormat::Csv;
    if (name == "json" || name == "structured-text") return EmitFormat::Json;
    throw std::runtime_error("unknown format '" + name + "' (expected csv or json)");
}

void add_common(CLI::App* cmd, CommonFlags& f, bool with_method) {
    cmd->fallthrough();
    cmd->add_option("--scenario", f.scenario, "doorway | intersection | hallway | lcorner");
    cmd->add_option("--agents", f.agents, "agent count")->check(CLI::PositiveNumber);
    if (with_method) {
        cmd->add_option("--method", f.method, "spgp | sbc")
            ->check(CLI::IsMember({"spgp", "sbc"}));
    }
    cmd->add_option("--trials", f.trials, "seeded trials per experiment")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "base seed (trial k uses seed+k)");
    cmd->add_option("--delta", f.delta, "perturbation radius override, m");
    cmd->add_option("--gamma", f.gamma, "barrier gamma override");
    cmd->add_option("--dt", f.dt, "time step override, s");
    cmd->add_option("--t-max", f.t_max, "step horizon override");
    cmd->add_option("--out", f.out, "aggregate output path (per-trial records go next to it)");
    cmd->add_option("--format", f.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json", "structured-text"}));
    cmd->add_option("--workers", f.workers, "parallel trial workers (0 = hardware)");
    cmd->add_option("--scenario-file", f.scenario_file,
                    "load the scenario document instead of building a preset");
    cmd->add_option("--override", f.overrides, "builder override key=value (repeatable)");
    cmd->add_option("--dump-log", f.dump_log, "write the first trial's trajectory log JSON");
    cmd->add_option("--plot", f.plot, "write an SVG plot");
}

void print_summary(const spgp::ExperimentSummary& s) {
    std::cout << s.scenario << " n=" << s.n_agents << " " << to_string(s.method)
              << " trials=" << s.trials << " seed=" << s.base_seed << "\n"
              << "  SR            " << s.sr.mean << " +- " << s.sr.stddev << " %\n"
              << "  avg dV        " << s.delta_v.mean << " +- " << s.delta_v.stddev << " m/s\n"
              << "  path dev      " << s.path_deviation.mean << " +- "
              << s.path_deviation.stddev << " m\n"
              << "  makespan      " << s.makespan.mean << " +- " << s.makespan.stddev
              << " steps\n"
              << "  min pair h    " << s.min_pairwise_h << " m\n";
}

int cmd_run(const CommonFlags& f) {
    const auto config = make_config(f);
    const Method method = spgp::method_from_string(f.method);
    const auto summary = spgp::run_experiment(config, method, f.trials, f.seed, f.workers);
    print_summary(summary);
    if (!f.out.empty()) {
        spgp::emit_results(summary, parse_format(f.format), f.out);
        std::cout << "wrote " << f.out << " and " << spgp::trials_sidecar_path(f.out) << "\n";
    }
    if (!f.dump_log.empty() || !f.plot.empty()) {
        spgp::SimOptions options;
        options.perturbation_enabled = method == Method::Spgp;
        const auto [log, result] = spgp::run(config, f.seed, options);
        (void)result;
        if (!f.dump_log.empty()) {
            write_file(f.dump_log, spgp::save_log(log));
            std::cout << "wrote " << f.dump_log << "\n";
        }
        if (!f.plot.empty()) {
            spgp::emit_plot(log, f.plot);
            std::cout << "wrote " << f.plot << "\n";
        }
    }
    return 0;
}

int cmd_sweep(const CommonFlags& f, const std::vector<double>& deltas) {
    const auto config = make_config(f);
    const auto sweep = spgp::sweep_radius(config, deltas, f.trials, f.seed, f.workers);
    std::cout << "delta -> mean makespan (steps)\n";
    for (const auto& p : sweep.points) {
        std::cout << "  " << p.delta << " -> " << p.mean_makespan
                  << "  (SR " << p.summary.sr.mean << "%)\n";
    }
    if (!f.out.empty()) {
        spgp::emit_results(sweep, parse_format(f.format), f.out);
        std::cout << "wrote " << f.out << " and " << spgp::trials_sidecar_path(f.out) << "\n";
    }
    if (!f.plot.empty()) {
        spgp::emit_plot(sweep, f.plot);
        std::cout << "wrote " << f.plot << "\n";
    }
    return 0;
}

// Rebuilds a sweep curve from our sweep CSV schema (for `render --sweep`).
spgp::SweepResult parse_sweep_csv(const std::string& text) {
    spgp::SweepResult sweep;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("sweep csv: empty file");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() < 4) {
            throw std::runtime_error("sweep csv: malformed row '" + line + "'");
        }
        spgp::SweepPoint p;
        p.delta = std::stod(cells[2]);
        p.mean_makespan = std::stod(cells[3]);
        sweep.points.push_back(p);
    }
    if (sweep.points.empty()) {
        throw std::runtime_error("sweep csv: no data rows");
    }
    return sweep;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safety-barrier multi-agent navigation simulator with strategic "
                 "pseudo-goal perturbation"};
    app.require_subcommand(1);
    app.fallthrough();

    // A config file mirrors the flags; explicit flags win. Values are applied as
    // defaults during the pre-scan below, so the option itself is parsed anywhere.
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with default flag values")
        ->envname("SPGP_CONFIG");

    CommonFlags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "run one experiment and emit results");
    add_common(run_cmd, run_flags, true);

    CommonFlags sweep_flags;
    std::vector<double> deltas{0.5, 1.0, 1.5, 2.0};
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "perturbation-radius sweep (SPGP method)");
    add_common(sweep_cmd, sweep_flags, false);
    sweep_cmd->add_option("--deltas", deltas, "radii to sweep")->delimiter(',');

    std::string render_log, render_sweep, render_out;
    CLI::App* render_cmd = app.add_subcommand("render", "render a log or sweep to SVG");
    render_cmd->add_option("--log", render_log, "trajectory log JSON");
    render_cmd->add_option("--sweep", render_sweep, "sweep CSV");
    render_cmd->add_option("--out", render_out, "output SVG path")->required();

    std::string sc_name = "doorway", sc_save, sc_load, sc_validate;
    int sc_agents = 2;
    std::vector<std::string> sc_overrides;
    CLI::App* sc_cmd = app.add_subcommand("scenario", "build, save, load, validate scenarios");
    sc_cmd->add_option("--name", sc_name, "preset name");
    sc_cmd->add_option("--agents", sc_agents, "agent count");
    sc_cmd->add_option("--override", sc_overrides, "builder override key=value");
    sc_cmd->add_option("--save", sc_save, "write the scenario document here");
    sc_cmd->add_option("--load", sc_load, "load a scenario document (then --save re-emits)");
    sc_cmd->add_option("--validate", sc_validate, "validate a scenario document");

    try {
        // Pre-scan for --config so file values become defaults the flags override.
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
        }
        if (!config_path.empty()) {
            const auto j = nlohmann::json::parse(read_file(config_path));
            for (CommonFlags* f : {&run_flags, &sweep_flags}) {
                if (j.contains("scenario")) f->scenario = j["scenario"].get<std::string>();
                if (j.contains("agents")) f->agents = j["agents"].get<int>();
                if (j.contains("method")) f->method = j["method"].get<std::string>();
                if (j.contains("trials")) f->trials = j["trials"].get<int>();
                if (j.contains("seed")) f->seed = j["seed"].get<std::uint64_t>();
                if (j.contains("delta")) f->delta = j["delta"].get<double>();
                if (j.contains("gamma")) f->gamma = j["gamma"].get<double>();
                if (j.contains("dt")) f->dt = j["dt"].get<double>();
                if (j.contains("t_max")) f->t_max = j["t_max"].get<int>();
                if (j.contains("out")) f->out = j["out"].get<std::string>();
                if (j.contains("format")) f->format = j["format"].get<std::string>();
                if (j.contains("workers")) f->workers = j["workers"].get<int>();
            }
            if (j.contains("deltas")) deltas = j["deltas"].get<std::vector<double>>();
        }

        app.parse(argc, argv);

        if (run_cmd->parsed()) return cmd_run(run_flags);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, deltas);
        if (render_cmd->parsed()) {
            if (render_log.empty() == render_sweep.empty()) {
                throw std::runtime_error("render: pass exactly one of --log or --sweep");
            }
            if (!render_log.empty()) {
                spgp::emit_plot(spgp::load_log(read_file(render_log)), render_out);
            } else {
                spgp::emit_plot(parse_sweep_csv(read_file(render_sweep)), render_out);
            }
            std::cout << "wrote " << render_out << "\n";
            return 0;
        }
        if (sc_cmd->parsed()) {
            if (!sc_validate.empty()) {
                spgp::load_scenario(read_file(sc_validate));
                std::cout << sc_validate << ": valid\n";
                return 0;
            }
            spgp::ScenarioConfig config;
            if (!sc_load.empty()) {
                config = spgp::load_scenario(read_file(sc_load));
            } else {
                config = spgp::build_scenario(sc_name, sc_agents, parse_overrides(sc_overrides));
            }
            const std::string doc = spgp::save_scenario(config);
            if (!sc_save.empty()) {
                write_file(sc_save, doc);
                std::cout << "wrote " << sc_save << "\n";
            } else {
                std::cout << doc;
            }
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
