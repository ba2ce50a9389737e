#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ecs/experiment.hpp"

namespace {

using ecs::EngineMode;
using ecs::ExperimentConfig;

struct RawFlags {
    std::string alpha, eps_plus, eps_minus, qubit_a, qubit_b;
    std::string channel_sign, engine, format, output, config_path, grid;
    int cutoff = 1, parties = 3, partition = 0, n = 5, count = 100;
    double mass_tol = 1e-10;
    unsigned long long seed = 0;
};

EngineMode engine_mode(const std::string& s) {
    if (s == "analytic") return EngineMode::kAnalytic;
    if (s == "fock") return EngineMode::kFock;
    if (s == "both") return EngineMode::kBoth;
    throw ecs::Error("engine must be analytic, fock, or both");
}

ecs::ChannelSign sign_mode(const std::string& s) {
    if (s == "minus") return ecs::ChannelSign::kMinus;
    if (s == "plus") return ecs::ChannelSign::kPlus;
    throw ecs::Error("channel sign must be minus or plus");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ecs::IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void add_engine(CLI::App* sub, RawFlags& raw) {
    sub->add_option("--engine", raw.engine,
                    "computation engine: analytic, fock, or both");
    sub->add_option("--cutoff-override", raw.cutoff,
                    "replace the automatic Fock cutoffs");
}

void add_io(CLI::App* sub, RawFlags& raw) {
    sub->add_option("--output", raw.output, "write the report to this path");
    sub->add_option("--format", raw.format, "report format: json or csv");
    sub->add_option("--config", raw.config_path,
                    "JSON config file; explicit flags override its values");
}

void add_state(CLI::App* sub, RawFlags& raw) {
    sub->add_option("--alpha", raw.alpha, "coherent amplitude, re,im");
    sub->add_option("--eps-plus", raw.eps_plus,
                    "weight of the +alpha branch, re,im");
    sub->add_option("--eps-minus", raw.eps_minus,
                    "weight of the -alpha branch, re,im");
    sub->add_option("--channel-sign", raw.channel_sign,
                    "channel superposition sign: minus or plus");
    sub->add_option("--mass-tolerance", raw.mass_tol,
                    "stop enumerating outcomes once 1 - tol mass is covered");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"teleportation of entangled coherent states through "
                 "balanced beam splitters"};
    app.require_subcommand(1);
    RawFlags raw;

    auto* teleport = app.add_subcommand(
        "teleport", "teleport a bipartite entangled coherent state");
    add_state(teleport, raw);
    add_engine(teleport, raw);
    add_io(teleport, raw);

    auto* tripartite = app.add_subcommand(
        "teleport-tripartite", "teleport a tripartite entangled coherent state");
    add_state(tripartite, raw);
    add_engine(tripartite, raw);
    add_io(tripartite, raw);

    auto* prepare = app.add_subcommand(
        "channel-prepare", "build the channel from a cat state and splitters");
    prepare->add_option("--alpha", raw.alpha, "coherent amplitude, re,im");
    prepare->add_option("--parties", raw.parties, "number of channel modes");
    prepare->add_option("--channel-sign", raw.channel_sign,
                        "channel superposition sign (minus only)");
    add_engine(prepare, raw);
    add_io(prepare, raw);

    auto* scan_s = app.add_subcommand(
        "scan-success", "success probability over a grid of amplitudes");
    scan_s->add_option("--alpha-grid", raw.grid, "grid start:stop:step");
    scan_s->add_option("--eps-plus", raw.eps_plus,
                       "weight of the +alpha branch, re,im");
    scan_s->add_option("--eps-minus", raw.eps_minus,
                       "weight of the -alpha branch, re,im");
    scan_s->add_option("--channel-sign", raw.channel_sign,
                       "channel superposition sign: minus or plus");
    scan_s->add_option("--mass-tolerance", raw.mass_tol,
                       "stop enumerating outcomes once 1 - tol mass is covered");
    add_engine(scan_s, raw);
    add_io(scan_s, raw);

    auto* scan_c = app.add_subcommand(
        "scan-concurrence", "channel concurrence over a grid of amplitudes");
    scan_c->add_option("--alpha-grid", raw.grid, "grid start:stop:step");
    scan_c->add_option("--channel-sign", raw.channel_sign,
                       "channel superposition sign: minus or plus");
    scan_c->add_option("--partition", raw.partition,
                       "mode singled out by the bipartition (0, 1, or 2)");
    add_engine(scan_c, raw);
    add_io(scan_c, raw);

    auto* limit = app.add_subcommand(
        "limit-check", "small-amplitude limit: qubit teleportation on three modes");
    limit->add_option("--qubit-a", raw.qubit_a, "vacuum weight, re,im");
    limit->add_option("--qubit-b", raw.qubit_b, "single-photon weight, re,im");
    limit->add_option("--alpha", raw.alpha,
                      "amplitude for the channel fidelity cross-check");
    add_engine(limit, raw);
    add_io(limit, raw);

    auto* parity = app.add_subcommand(
        "parity-demo", "dispersive parity readout of a Fock state");
    parity->add_option("--n", raw.n, "photon number of the probe state");
    parity->add_option("--seed", raw.seed, "sample the atom instead of "
                                           "reporting the likelier outcome");
    add_engine(parity, raw);
    add_io(parity, raw);

    auto* cross = app.add_subcommand(
        "cross-validate", "random circuits run on both engines and compared");
    cross->add_option("--count", raw.count, "number of random circuits");
    cross->add_option("--seed", raw.seed, "generator seed");
    add_io(cross, raw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    auto passed = [&](const char* name) {
        auto* opt = sub->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };

    ExperimentConfig cfg;
    try {
        if (passed("--config")) cfg = ecs::config_from_json(slurp(raw.config_path));
        cfg.experiment = ecs::experiment_from_name(sub->get_name());
        if (passed("--alpha")) cfg.alpha = ecs::parse_complex(raw.alpha);
        if (passed("--eps-plus")) cfg.eps_plus = ecs::parse_complex(raw.eps_plus);
        if (passed("--eps-minus"))
            cfg.eps_minus = ecs::parse_complex(raw.eps_minus);
        if (passed("--qubit-a")) cfg.qubit_a = ecs::parse_complex(raw.qubit_a);
        if (passed("--qubit-b")) cfg.qubit_b = ecs::parse_complex(raw.qubit_b);
        if (passed("--channel-sign")) cfg.channel_sign = sign_mode(raw.channel_sign);
        if (passed("--engine")) {
            cfg.engine = engine_mode(raw.engine);
            cfg.engine_given = true;
        }
        if (passed("--cutoff-override")) cfg.cutoff_override = raw.cutoff;
        if (passed("--mass-tolerance")) cfg.mass_tolerance = raw.mass_tol;
        if (passed("--seed")) cfg.seed = raw.seed;
        if (passed("--output")) cfg.output_path = raw.output;
        if (passed("--format")) cfg.format = raw.format;
        if (passed("--alpha-grid")) cfg.alpha_grid = ecs::GridSpec::parse(raw.grid);
        if (passed("--parties")) cfg.parties = raw.parties;
        if (passed("--partition")) cfg.partition = raw.partition;
        if (passed("--n")) cfg.parity_n = raw.n;
        if (passed("--count")) cfg.cross_count = raw.count;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }

    ecs::RunResult rr = ecs::run_experiment(cfg);
    if (!rr.message.empty()) std::fprintf(stderr, "%s\n", rr.message.c_str());
    if (rr.exit_code == 0 && cfg.output_path.empty())
        std::fputs(rr.artifact.c_str(), stdout);
    return rr.exit_code;
}
