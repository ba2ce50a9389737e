#include "ecs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "ecs/analysis.hpp"
#include "ecs/reporting.hpp"

namespace ecs {

namespace {

using nlohmann::json;

Engine to_engine(EngineMode m) {
    return m == EngineMode::kFock ? Engine::kFock : Engine::kAnalytic;
}

cx complex_from_json(const json& j, const char* key) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_string()) return parse_complex(j.get<std::string>());
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw Error(std::string("config key '") + key +
                "' must be a number, \"re,im\", or [re,im]");
}

void validate(const ExperimentConfig& cfg) {
    if (!(cfg.mass_tolerance > 0.0) || cfg.mass_tolerance >= 1.0)
        throw Error("mass_tolerance must lie in (0, 1)");
    if (cfg.cutoff_override && *cfg.cutoff_override < 1)
        throw Error("cutoff_override must be at least 1");
    if (!cfg.format.empty() && cfg.format != "json" && cfg.format != "csv")
        throw Error("format must be json or csv");
}

bool is_scan(ExperimentKind k) {
    return k == ExperimentKind::kScanSuccess ||
           k == ExperimentKind::kScanConcurrence;
}

std::string resolve_format(const ExperimentConfig& cfg) {
    if (cfg.format.empty()) return is_scan(cfg.experiment) ? "csv" : "json";
    if (cfg.format == "csv" && !is_scan(cfg.experiment))
        throw Error(std::string(to_string(cfg.experiment)) +
                    " emits json only");
    return cfg.format;
}

// both-engine gate: every reported probability must agree within 1e-6
void gate_reports(const TeleportReport& a, const TeleportReport& b) {
    if (std::abs(a.success_probability - b.success_probability) > 1e-6)
        throw EngineDisagreement("engines disagree on the success probability");
    std::map<std::pair<int, int>, double> pa, pb;
    for (const auto& o : a.outcomes) pa[{o.cls.n, o.cls.m}] = o.probability;
    for (const auto& o : b.outcomes) pb[{o.cls.n, o.cls.m}] = o.probability;
    auto get = [](const std::map<std::pair<int, int>, double>& m,
                  std::pair<int, int> k) {
        auto it = m.find(k);
        return it == m.end() ? 0.0 : it->second;
    };
    for (const auto& [k, p] : pa)
        if (std::abs(p - get(pb, k)) > 1e-6)
            throw EngineDisagreement("engines disagree on an outcome probability");
    for (const auto& [k, p] : pb)
        if (std::abs(p - get(pa, k)) > 1e-6)
            throw EngineDisagreement("engines disagree on an outcome probability");
}

std::string run_teleport(const ExperimentConfig& cfg, int parties) {
    auto in = ECSSpec::make(cfg.eps_plus, cfg.eps_minus, cfg.alpha, parties);
    auto ch = ChannelSpec::make(cfg.channel_sign, cfg.alpha, parties + 1);
    TeleportOptions opt;
    opt.mass_tolerance = cfg.mass_tolerance;
    opt.cutoff_override = cfg.cutoff_override;
    if (cfg.engine == EngineMode::kBoth) {
        auto ra = teleport_ecs(in, ch, Engine::kAnalytic, opt);
        auto rf = teleport_ecs(in, ch, Engine::kFock, opt);
        gate_reports(ra, rf);
        return report_to_json(ra);
    }
    return report_to_json(teleport_ecs(in, ch, to_engine(cfg.engine), opt));
}

std::string run_channel_prepare(const ExperimentConfig& cfg) {
    if (cfg.channel_sign != ChannelSign::kMinus)
        throw Error("the splitter cascade prepares the minus channel only");
    if (cfg.parties < 2) throw Error("channel needs at least two parties");
    auto direct_spec = ChannelSpec::make(ChannelSign::kMinus, cfg.alpha,
                                         cfg.parties);
    auto direct = build_channel(direct_spec);

    double fid_analytic = 0.0;
    std::string state_json;
    if (cfg.engine != EngineMode::kFock) {
        auto prep = prepare_channel_via_bs(cfg.alpha, cfg.parties);
        cx ov = overlap(prep, direct);
        fid_analytic = std::norm(ov);
        state_json = state_to_json(prep);
    }
    double fid_fock = 0.0;
    std::vector<int> cutoffs;
    if (cfg.engine != EngineMode::kAnalytic) {
        FockState prep = prepare_channel_via_bs_fock(
            cfg.alpha, cfg.parties, cfg.cutoff_override.value_or(0));
        cutoffs = prep.cutoffs;
        auto ref = to_fock(direct, prep.cutoffs);
        fid_fock = fidelity(prep, ref.state);
    }
    if (cfg.engine == EngineMode::kBoth &&
        std::abs(fid_analytic - fid_fock) > 1e-6)
        throw EngineDisagreement("engines disagree on the preparation fidelity");

    std::ostringstream out;
    out << "{\"params\":{\"alpha\":" << format_complex(cfg.alpha)
        << ",\"parties\":" << cfg.parties << ",\"channel_sign\":\"minus\"}";
    if (cfg.engine == EngineMode::kFock) {
        out << ",\"engine\":\"fock\",\"fidelity_to_direct\":"
            << format_double(fid_fock) << ",\"cutoffs\":[";
        for (std::size_t k = 0; k < cutoffs.size(); ++k)
            out << (k ? "," : "") << cutoffs[k];
        out << "]}";
        return out.str();
    }
    out << ",\"engine\":\"analytic\",\"fidelity_to_direct\":"
        << format_double(fid_analytic);
    if (cfg.engine == EngineMode::kBoth)
        out << ",\"fock_fidelity_to_direct\":" << format_double(fid_fock);
    out << ",\"state\":" << state_json << "}";
    return out.str();
}

double success_at(const ExperimentConfig& cfg, double alpha, Engine engine) {
    auto in = ECSSpec::make(cfg.eps_plus, cfg.eps_minus, cx(alpha, 0.0), 2);
    auto ch = ChannelSpec::make(cfg.channel_sign, cx(alpha, 0.0), 3);
    TeleportOptions opt;
    opt.mass_tolerance = cfg.mass_tolerance;
    opt.cutoff_override = cfg.cutoff_override;
    return teleport_ecs(in, ch, engine, opt).success_probability;
}

std::string run_scan_success(const ExperimentConfig& cfg,
                             const std::string& format) {
    GridSpec grid = cfg.alpha_grid.value_or(GridSpec{0.0, 3.0, 0.1});
    ClosedFormCurve curve;
    curve.name = cfg.channel_sign == ChannelSign::kMinus ? "success_minus"
                                                         : "success_plus";
    for (double a : grid.points()) {
        double value;
        if (cfg.engine == EngineMode::kBoth) {
            double va = success_at(cfg, a, Engine::kAnalytic);
            double vf = success_at(cfg, a, Engine::kFock);
            if (std::abs(va - vf) > 1e-6)
                throw EngineDisagreement("engines disagree on the success probability");
            value = va;
        } else {
            value = success_at(cfg, a, to_engine(cfg.engine));
        }
        curve.alpha.push_back(a);
        curve.values.push_back(value);
    }
    return format == "csv" ? curve_to_csv(curve) : curve_to_json(curve);
}

double concurrence_at(const ExperimentConfig& cfg, double alpha, Engine engine) {
    auto spec = ChannelSpec::make(cfg.channel_sign, cx(alpha, 0.0), 3);
    auto st = build_channel(spec);
    auto cut = Bipartition::of({std::size_t(cfg.partition)}, 3);
    if (engine == Engine::kAnalytic) return concurrence_pure(st, cut);
    std::vector<int> cutoffs;
    cutoffs.reserve(spec.label_layout.size());
    for (cx l : spec.label_layout)
        cutoffs.push_back(cfg.cutoff_override ? *cfg.cutoff_override
                                              : cutoff_for(std::norm(l)));
    return concurrence_pure(to_fock(st, cutoffs).state, cut);
}

std::string run_scan_concurrence(const ExperimentConfig& cfg,
                                 const std::string& format) {
    if (cfg.partition < 0 || cfg.partition > 2)
        throw Error("partition must be 0, 1, or 2");
    GridSpec grid = cfg.alpha_grid.value_or(GridSpec{0.05, 2.0, 0.05});
    ClosedFormCurve curve;
    curve.name = std::string("concurrence_") +
                 (cfg.channel_sign == ChannelSign::kMinus ? "minus" : "plus") +
                 "_mode" + std::to_string(cfg.partition);
    for (double a : grid.points()) {
        double value;
        if (cfg.engine == EngineMode::kBoth) {
            double va = concurrence_at(cfg, a, Engine::kAnalytic);
            double vf = concurrence_at(cfg, a, Engine::kFock);
            if (std::abs(va - vf) > 1e-6)
                throw EngineDisagreement("engines disagree on a concurrence value");
            value = va;
        } else {
            value = concurrence_at(cfg, a, to_engine(cfg.engine));
        }
        curve.alpha.push_back(a);
        curve.values.push_back(value);
    }
    return format == "csv" ? curve_to_csv(curve) : curve_to_json(curve);
}

std::string run_limit_check(const ExperimentConfig& cfg) {
    if (cfg.engine_given && cfg.engine != EngineMode::kFock)
        throw Error("limit-check runs on the fock engine");
    auto rep = small_alpha_teleport(cfg.qubit_a, cfg.qubit_b);
    rep.channel_limit_fidelity = channel_limit_fidelity(
        std::abs(cfg.alpha), cfg.cutoff_override.value_or(0));
    return report_to_json(rep);
}

std::string run_parity_demo(const ExperimentConfig& cfg) {
    if (cfg.engine_given && cfg.engine != EngineMode::kFock)
        throw Error("parity-demo runs on the fock engine");
    if (cfg.parity_n < 0) throw Error("photon number must be nonnegative");
    FockState field = fock_basis({cfg.parity_n + 1}, {cfg.parity_n});
    ParityResult res;
    if (cfg.seed) {
        std::mt19937_64 rng(*cfg.seed);
        res = parity_oracle(field, ParityModel{}, &rng);
    } else {
        res = parity_oracle(field, ParityModel{});
    }
    return parity_to_json(res);
}

std::string run_cross_validate(const ExperimentConfig& cfg) {
    auto sum = cross_validate(cfg.cross_count, cfg.seed.value_or(0x5eed));
    std::ostringstream out;
    out << "{\"circuits\":" << sum.circuits
        << ",\"min_fidelity\":" << format_double(sum.min_fidelity)
        << ",\"max_norm_drift\":" << format_double(sum.max_norm_drift)
        << ",\"failures\":" << sum.failures << "}";
    if (sum.failures > 0)
        throw EngineDisagreement("cross validation found circuits below the fidelity gate");
    return out.str();
}

std::string dispatch(const ExperimentConfig& cfg) {
    validate(cfg);
    const std::string format = resolve_format(cfg);
    switch (cfg.experiment) {
        case ExperimentKind::kTeleport: return run_teleport(cfg, 2);
        case ExperimentKind::kTeleportTripartite: return run_teleport(cfg, 3);
        case ExperimentKind::kChannelPrepare: return run_channel_prepare(cfg);
        case ExperimentKind::kScanSuccess: return run_scan_success(cfg, format);
        case ExperimentKind::kScanConcurrence:
            return run_scan_concurrence(cfg, format);
        case ExperimentKind::kLimitCheck: return run_limit_check(cfg);
        case ExperimentKind::kParityDemo: return run_parity_demo(cfg);
        default: return run_cross_validate(cfg);
    }
}

} // namespace

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::kTeleport: return "teleport";
        case ExperimentKind::kTeleportTripartite: return "teleport-tripartite";
        case ExperimentKind::kChannelPrepare: return "channel-prepare";
        case ExperimentKind::kScanSuccess: return "scan-success";
        case ExperimentKind::kScanConcurrence: return "scan-concurrence";
        case ExperimentKind::kLimitCheck: return "limit-check";
        case ExperimentKind::kParityDemo: return "parity-demo";
        default: return "cross-validate";
    }
}

cx parse_complex(const std::string& text) {
    std::istringstream in(text);
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(in >> re)) throw Error("cannot parse complex value '" + text + "'");
    if (in >> comma) {
        if (comma != ',' || !(in >> im))
            throw Error("complex values use re,im: '" + text + "'");
    }
    std::string rest;
    if (in >> rest) throw Error("trailing text in complex value '" + text + "'");
    return {re, im};
}

ExperimentKind experiment_from_name(const std::string& name) {
    for (auto k : {ExperimentKind::kTeleport, ExperimentKind::kTeleportTripartite,
                   ExperimentKind::kChannelPrepare, ExperimentKind::kScanSuccess,
                   ExperimentKind::kScanConcurrence, ExperimentKind::kLimitCheck,
                   ExperimentKind::kParityDemo, ExperimentKind::kCrossValidate})
        if (name == to_string(k)) return k;
    throw Error("unknown experiment '" + name + "'");
}

GridSpec GridSpec::parse(const std::string& text) {
    GridSpec g;
    std::istringstream in(text);
    char c1 = 0, c2 = 0;
    if (!(in >> g.start >> c1 >> g.stop >> c2 >> g.step) || c1 != ':' ||
        c2 != ':')
        throw Error("grids use start:stop:step: '" + text + "'");
    std::string rest;
    if (in >> rest) throw Error("trailing text in grid '" + text + "'");
    return g;
}

std::vector<double> GridSpec::points() const {
    if (!(step > 0.0)) throw Error("grid step must be positive");
    if (stop < start) throw Error("grid stop precedes its start");
    std::vector<double> out;
    for (std::size_t k = 0;; ++k) {
        double v = start + double(k) * step;
        if (v > stop + 0.5 * step) break;
        out.push_back(v);
        if (out.size() > 1000000) throw Error("grid has over a million points");
    }
    return out;
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw Error(std::string("config is not valid json: ") + e.what());
    }
    if (!j.is_object()) throw Error("config must be a json object");

    ExperimentConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "experiment") {
            cfg.experiment = experiment_from_name(value.get<std::string>());
        } else if (key == "alpha") {
            cfg.alpha = complex_from_json(value, "alpha");
        } else if (key == "eps_plus") {
            cfg.eps_plus = complex_from_json(value, "eps_plus");
        } else if (key == "eps_minus") {
            cfg.eps_minus = complex_from_json(value, "eps_minus");
        } else if (key == "channel_sign") {
            const std::string s = value.get<std::string>();
            if (s == "minus") cfg.channel_sign = ChannelSign::kMinus;
            else if (s == "plus") cfg.channel_sign = ChannelSign::kPlus;
            else throw Error("channel_sign must be minus or plus");
        } else if (key == "engine") {
            const std::string s = value.get<std::string>();
            if (s == "analytic") cfg.engine = EngineMode::kAnalytic;
            else if (s == "fock") cfg.engine = EngineMode::kFock;
            else if (s == "both") cfg.engine = EngineMode::kBoth;
            else throw Error("engine must be analytic, fock, or both");
            cfg.engine_given = true;
        } else if (key == "cutoff_override") {
            cfg.cutoff_override = value.get<int>();
        } else if (key == "mass_tolerance") {
            cfg.mass_tolerance = value.get<double>();
        } else if (key == "seed") {
            cfg.seed = value.get<unsigned long long>();
        } else if (key == "output") {
            cfg.output_path = value.get<std::string>();
        } else if (key == "format") {
            cfg.format = value.get<std::string>();
        } else if (key == "alpha_grid") {
            if (value.is_string()) {
                cfg.alpha_grid = GridSpec::parse(value.get<std::string>());
            } else if (value.is_object()) {
                GridSpec g;
                g.start = value.at("start").get<double>();
                g.stop = value.at("stop").get<double>();
                g.step = value.at("step").get<double>();
                cfg.alpha_grid = g;
            } else {
                throw Error("alpha_grid must be \"start:stop:step\" or an object");
            }
        } else if (key == "parties") {
            cfg.parties = value.get<int>();
        } else if (key == "partition") {
            cfg.partition = value.get<int>();
        } else if (key == "n") {
            cfg.parity_n = value.get<int>();
        } else if (key == "count") {
            cfg.cross_count = value.get<int>();
        } else if (key == "qubit_a") {
            cfg.qubit_a = complex_from_json(value, "qubit_a");
        } else if (key == "qubit_b") {
            cfg.qubit_b = complex_from_json(value, "qubit_b");
        } else {
            throw Error("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    RunResult rr;
    try {
        std::string payload = dispatch(cfg);
        if (payload.empty() || payload.back() != '\n') payload += '\n';
        if (!cfg.output_path.empty()) {
            write_text(cfg.output_path, payload);
            rr.message = "wrote " + cfg.output_path;
        }
        rr.artifact = std::move(payload);
    } catch (const NearSingularState& e) {
        rr.exit_code = 3;
        rr.message = e.what();
    } catch (const NonConvergence& e) {
        rr.exit_code = 3;
        rr.message = e.what();
    } catch (const EngineDisagreement& e) {
        rr.exit_code = 3;
        rr.message = e.what();
    } catch (const std::exception& e) {
        rr.exit_code = 2;
        rr.message = e.what();
    }
    return rr;
}

CrossValidateSummary cross_validate(int count, unsigned long long seed,
                                    double gate) {
    if (count < 1) throw Error("circuit count must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double two_pi = 6.283185307179586;

    CrossValidateSummary sum;
    while (sum.circuits < count) {
        const int modes = std::min(3, 1 + int(u(rng) * 3.0));
        const int terms = std::min(6, 1 + int(u(rng) * 6.0));
        std::vector<CoherentTerm> ts(static_cast<std::size_t>(terms));
        for (auto& t : ts) {
            t.coeff = cx(2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0);
            t.labels.resize(std::size_t(modes));
            for (auto& l : t.labels)
                l = std::polar(1.5 * std::sqrt(u(rng)), two_pi * u(rng));
        }
        CoherentSuperposition st0;
        try {
            st0 = normalize(make_superposition(std::size_t(modes), std::move(ts)));
        } catch (const NearSingularState&) {
            continue; // nearly cancelling draw; try another
        }

        struct Op {
            int kind; // 0 balanced, 1 raw, 2 phase
            std::size_t i, j;
            double phi;
        };
        const int nops = std::min(6, int(u(rng) * 7.0));
        std::vector<Op> ops(static_cast<std::size_t>(nops));
        for (auto& op : ops) {
            op.kind = modes == 1 ? 2 : int(u(rng) * 3.0) % 3;
            op.i = std::size_t(u(rng) * modes) % std::size_t(modes);
            if (op.kind == 2) {
                op.j = op.i;
                op.phi = two_pi * u(rng);
            } else {
                op.j = (op.i + 1 + std::size_t(u(rng) * (modes - 1)) %
                                       std::size_t(modes - 1)) %
                       std::size_t(modes);
                op.phi = 0.0;
            }
        }

        // analytic pass, tracking the photon-number peak per mode
        std::vector<double> mu(std::size_t(modes), 0.0);
        auto track = [&](const CoherentSuperposition& s) {
            for (const auto& t : s.terms)
                for (std::size_t m = 0; m < t.labels.size(); ++m)
                    mu[m] = std::max(mu[m], std::norm(t.labels[m]));
        };
        CoherentSuperposition sa = st0;
        track(sa);
        for (const auto& op : ops) {
            if (op.kind == 0) sa = apply_balanced_bs(sa, op.i, op.j);
            else if (op.kind == 1) sa = apply_raw_bs(sa, op.i, op.j);
            else sa = apply_phase_shift(sa, op.i, op.phi);
            track(sa);
        }
        const int cutoff = cutoff_for(*std::max_element(mu.begin(), mu.end()));

        FockState sf = to_fock(st0, cutoff).state;
        const double n0 = fock_norm2(sf);
        for (const auto& op : ops) {
            if (op.kind == 0) sf = apply_two_mode_bs(sf, op.i, op.j, BsVariant::kBalanced);
            else if (op.kind == 1) sf = apply_two_mode_bs(sf, op.i, op.j, BsVariant::kRaw);
            else sf = apply_phase_fock(sf, op.i, op.phi);
        }
        const double drift = std::abs(fock_norm2(sf) - n0);
        const double fid = fidelity(to_fock(sa, cutoff).state, sf);

        ++sum.circuits;
        sum.min_fidelity = std::min(sum.min_fidelity, fid);
        sum.max_norm_drift = std::max(sum.max_norm_drift, drift);
        if (fid < 1.0 - gate) ++sum.failures;
    }
    return sum;
}

} // namespace ecs
