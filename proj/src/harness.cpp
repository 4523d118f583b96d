#include "spgp/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace spgp {

namespace {

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd ms;
    ms.mean = mean_of(xs);
    double var = 0.0;
    for (double x : xs) var += (x - ms.mean) * (x - ms.mean);
    var = xs.empty() ? 0.0 : var / static_cast<double>(xs.size());
    ms.stddev = var > 0.0 ? std::sqrt(var) : 0.0;
    return ms;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

std::string trials_csv(const ExperimentSummary& s) {
    std::ostringstream out;
    out << "scenario,method,seed,agent,success,collision,makespan,avg_delta_v,"
           "path_deviation,deadlocks,qp_infeasible,min_pairwise_h\n";
    for (const TrialRecord& t : s.trial_records) {
        for (std::size_t i = 0; i < t.result.makespan.size(); ++i) {
            out << s.scenario << ',' << to_string(s.method) << ',' << t.seed << ',' << i << ','
                << (t.result.success ? 1 : 0) << ',' << (t.result.collision ? 1 : 0) << ','
                << t.result.makespan[i] << ',' << fmt(t.result.avg_delta_v[i]) << ','
                << fmt(t.result.path_deviation[i]) << ',' << t.result.deadlock_count << ','
                << t.result.qp_infeasible_count << ',' << fmt(t.result.min_pairwise_h) << '\n';
        }
    }
    return out.str();
}

nlohmann::json summary_json(const ExperimentSummary& s) {
    nlohmann::json j;
    j["scenario"] = s.scenario;
    j["method"] = to_string(s.method);
    j["n_agents"] = s.n_agents;
    j["trials"] = s.trials;
    j["base_seed"] = s.base_seed;
    j["sr"] = {{"mean", s.sr.mean}, {"std", s.sr.stddev}};
    j["avg_delta_v"] = {{"mean", s.delta_v.mean}, {"std", s.delta_v.stddev}};
    j["path_deviation"] = {{"mean", s.path_deviation.mean}, {"std", s.path_deviation.stddev}};
    j["makespan"] = {{"mean", s.makespan.mean}, {"std", s.makespan.stddev}};
    j["min_pairwise_h"] = s.min_pairwise_h;
    return j;
}

}  // namespace

std::string to_string(Method method) { return method == Method::Spgp ? "spgp" : "sbc"; }

Method method_from_string(const std::string& name) {
    if (name == "spgp") return Method::Spgp;
    if (name == "sbc") return Method::Sbc;
    throw std::invalid_argument("unknown method '" + name + "' (expected spgp or sbc)");
}

ExperimentSummary run_experiment(const ScenarioConfig& config, Method method, int trials,
                                 std::uint64_t base_seed, int workers) {
    if (trials < 1) {
        throw std::invalid_argument("run_experiment: trials must be >= 1");
    }
    validate(config);
    SimOptions options;
    options.perturbation_enabled = method == Method::Spgp;

    std::vector<TrialRecord> records(trials);
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= trials) return;
            try {
                const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
                auto [log, result] = run(config, seed, options);
                records[i] = {seed, std::move(result)};
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    int thread_count = workers > 0 ? workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
    thread_count = std::max(1, std::min(thread_count, trials));
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ExperimentSummary s;
    s.scenario = config.name;
    s.method = method;
    s.n_agents = static_cast<int>(config.agents.size());
    s.trials = trials;
    s.base_seed = base_seed;
    s.trial_records = std::move(records);

    std::vector<double> sr, dv, dev, ms;
    s.min_pairwise_h = std::numeric_limits<double>::infinity();
    for (const TrialRecord& t : s.trial_records) {
        sr.push_back(t.result.success ? 100.0 : 0.0);
        dv.push_back(mean_of(t.result.avg_delta_v));
        dev.push_back(mean_of(t.result.path_deviation));
        std::vector<double> spans(t.result.makespan.begin(), t.result.makespan.end());
        ms.push_back(mean_of(spans));
        s.min_pairwise_h = std::min(s.min_pairwise_h, t.result.min_pairwise_h);
    }
    s.sr = mean_std(sr);
    s.delta_v = mean_std(dv);
    s.path_deviation = mean_std(dev);
    s.makespan = mean_std(ms);
    return s;
}

SweepResult sweep_radius(const ScenarioConfig& config, const std::vector<double>& deltas,
                         int trials, std::uint64_t base_seed, int workers) {
    if (deltas.empty()) {
        throw std::invalid_argument("sweep_radius: deltas must be non-empty");
    }
    SweepResult result;
    for (double delta : deltas) {
        if (!(delta > 0.0)) {
            throw std::invalid_argument("sweep_radius: deltas must be > 0");
        }
        ScenarioConfig cfg = config;
        cfg.spgp.delta = delta;
        SweepPoint point;
        point.delta = delta;
        point.summary = run_experiment(cfg, Method::Spgp, trials, base_seed, workers);
        point.mean_makespan = point.summary.makespan.mean;
        result.points.push_back(std::move(point));
    }
    return result;
}

std::string trials_sidecar_path(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + ".trials";
    }
    return path.substr(0, dot) + ".trials" + path.substr(dot);
}

void emit_results(const ExperimentSummary& s, EmitFormat format, const std::string& path) {
    if (format == EmitFormat::Csv) {
        std::ostringstream out;
        out << "scenario,method,metric,mean,std,trials,seed\n";
        const auto row = [&](const char* metric, const MeanStd& m) {
            out << s.scenario << ',' << to_string(s.method) << ',' << metric << ','
                << fmt(m.mean) << ',' << fmt(m.stddev) << ',' << s.trials << ',' << s.base_seed
                << '\n';
        };
        row("sr", s.sr);
        row("avg_delta_v", s.delta_v);
        row("path_deviation", s.path_deviation);
        row("makespan", s.makespan);
        write_file(path, out.str());
    } else {
        nlohmann::json j = summary_json(s);
        write_file(path, j.dump(2) + "\n");
    }
    write_file(trials_sidecar_path(path), trials_csv(s));
}

void emit_results(const SweepResult& sweep, EmitFormat format, const std::string& path) {
    if (sweep.points.empty()) {
        throw std::invalid_argument("emit_results: empty sweep");
    }
    if (format == EmitFormat::Csv) {
        std::ostringstream out;
        out << "scenario,method,delta,mean_makespan,sr_mean,trials,seed\n";
        for (const SweepPoint& p : sweep.points) {
            out << p.summary.scenario << ",spgp," << fmt(p.delta) << ','
                << fmt(p.mean_makespan) << ',' << fmt(p.summary.sr.mean) << ','
                << p.summary.trials << ',' << p.summary.base_seed << '\n';
        }
        write_file(path, out.str());
    } else {
        nlohmann::json j = nlohmann::json::array();
        for (const SweepPoint& p : sweep.points) {
            nlohmann::json e = summary_json(p.summary);
            e["delta"] = p.delta;
            j.push_back(e);
        }
        write_file(path, j.dump(2) + "\n");
    }
    std::ostringstream trials;
    bool first = true;
    for (const SweepPoint& p : sweep.points) {
        std::string csv = trials_csv(p.summary);
        if (!first) csv = csv.substr(csv.find('\n') + 1);  // drop repeated header
        trials << csv;
        first = false;
    }
    write_file(trials_sidecar_path(path), trials.str());
}

}  // namespace spgp
