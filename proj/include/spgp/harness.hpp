#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spgp/metrics.hpp"
#include "spgp/scenario.hpp"
#include "spgp/simulator.hpp"

namespace spgp {

enum class Method { Spgp, Sbc };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

struct TrialRecord {
    std::uint64_t seed = 0;
    TrialResult result;
};

struct ExperimentSummary {
    std::string scenario;
    Method method = Method::Spgp;
    int n_agents = 0;
    int trials = 0;
    std::uint64_t base_seed = 0;
    MeanStd sr;              // percent of successful trials
    MeanStd delta_v;         // per-trial mean over agents, m/s
    MeanStd path_deviation;  // per-trial mean over agents, m
    MeanStd makespan;        // per-trial mean over agents, steps
    double min_pairwise_h = 0.0;  // over every trial
    std::vector<TrialRecord> trial_records;
};

/// Runs `trials` seeded trials (seeds base_seed .. base_seed+trials-1), up to `workers`
/// concurrently (0 = hardware concurrency), and aggregates mean and population std.
/// Deterministic for fixed inputs regardless of worker count.
ExperimentSummary run_experiment(const ScenarioConfig& config, Method method, int trials,
                                 std::uint64_t base_seed, int workers = 0);

struct SweepPoint {
    double delta = 0.0;
    double mean_makespan = 0.0;
    ExperimentSummary summary;
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

/// One SPGP experiment per delta; the scenario's perturbation radius is overridden
/// point by point.
SweepResult sweep_radius(const ScenarioConfig& config, const std::vector<double>& deltas,
                         int trials, std::uint64_t base_seed, int workers = 0);

enum class EmitFormat { Csv, Json };

/// Writes the aggregate document to `path` and the per-trial records next to it
/// (suffix ".trials" before the extension). Byte-stable for identical inputs.
void emit_results(const ExperimentSummary& summary, EmitFormat format,
                  const std::string& path);
void emit_results(const SweepResult& sweep, EmitFormat format, const std::string& path);

/// Self-contained SVG: per-agent paths, obstacles, goals and pseudo-goal markers.
void emit_plot(const TrajectoryLog& log, const std::string& path);
/// Self-contained SVG line chart of mean makespan vs perturbation radius.
void emit_plot(const SweepResult& sweep, const std::string& path);

/// Path of the per-trial sidecar emitted with a summary ("x.csv" -> "x.trials.csv").
std::string trials_sidecar_path(const std::string& path);

}  // namespace spgp
