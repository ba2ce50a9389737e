#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecs/protocols.hpp"

namespace ecs {

enum class ExperimentKind {
    kTeleport,
    kTeleportTripartite,
    kChannelPrepare,
    kScanSuccess,
    kScanConcurrence,
    kLimitCheck,
    kParityDemo,
    kCrossValidate,
};

const char* to_string(ExperimentKind k);
ExperimentKind experiment_from_name(const std::string& name);

enum class EngineMode { kAnalytic, kFock, kBoth };

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    static GridSpec parse(const std::string& text); // "start:stop:step"
    // start, start+step, ...; endpoint kept when within half a step of stop
    std::vector<double> points() const;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::kTeleport;
    cx alpha{1.0, 0.0};
    cx eps_plus{1.0, 0.0};
    cx eps_minus{1.0, 0.0};
    ChannelSign channel_sign = ChannelSign::kMinus;
    EngineMode engine = EngineMode::kAnalytic;
    bool engine_given = false; // parity-demo/limit-check default to fock
    std::optional<int> cutoff_override;
    double mass_tolerance = 1e-10;
    std::optional<unsigned long long> seed;
    std::string output_path; // empty: artifact goes to stdout
    std::string format;      // "", "json", "csv"
    std::optional<GridSpec> alpha_grid;
    int parties = 3;   // channel-prepare
    int partition = 0; // scan-concurrence: singled-out mode of the 3-mode channel
    int parity_n = 5;  // parity-demo Fock level
    cx qubit_a{1.0, 0.0};
    cx qubit_b{1.0, 0.0};
    int cross_count = 100;
};

// Parses the --config JSON payload. Unknown keys are rejected.
ExperimentConfig config_from_json(const std::string& text);

// "re,im" or a bare real part.
cx parse_complex(const std::string& text);

struct RunResult {
    int exit_code = 0;    // 0 ok, 2 validation error, 3 numerical failure
    std::string artifact; // report payload (also written to output_path if set)
    std::string message;  // human-readable diagnostics for stderr
};

RunResult run_experiment(const ExperimentConfig& cfg);

struct CrossValidateSummary {
    int circuits = 0;
    double min_fidelity = 1.0;
    double max_norm_drift = 0.0;
    int failures = 0;
};

// Random circuits of {balanced, raw, phase} on random superpositions, run on
// both engines; a failure is a final-state fidelity below 1 - gate.
CrossValidateSummary cross_validate(int count, unsigned long long seed,
                                    double gate = 1e-6);

}  // namespace ecs
