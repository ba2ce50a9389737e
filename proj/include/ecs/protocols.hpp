#pragma once

#include <optional>
#include <random>
#include <vector>

#include "ecs/analysis.hpp"
#include "ecs/coherent.hpp"
#include "ecs/fock.hpp"

namespace ecs {

// Amplitude layout (2^{(M-2)/2} a, ..., sqrt(2) a, a, a) produced by a
// balanced-splitter cascade.  Built by repeated (v+v)*kInvSqrt2 doubling so
// the labels match the cascade output bit for bit.
std::vector<cx> chain_layout(cx alpha, int modes);

// eps_plus |a,...,a> + eps_minus |-a,...,-a| over `parties` modes.
struct ECSSpec {
    cx eps_plus;
    cx eps_minus;
    cx alpha;
    int parties = 2;
    std::vector<cx> label_layout;  // chain amplitudes, head first

    static ECSSpec make(cx eps_plus, cx eps_minus, cx alpha, int parties);
};

// (|L> - |-L>)/N or (|L> + |-L>)/N over `parties` modes with chain layout L.
struct ChannelSpec {
    ChannelSign sign = ChannelSign::kMinus;
    cx alpha;
    int parties = 3;
    std::vector<cx> label_layout;

    static ChannelSpec make(ChannelSign sign, cx alpha, int parties);
};

CoherentSuperposition build_cat(cx eps_plus, cx eps_minus, cx alpha);
CoherentSuperposition build_ecs(const ECSSpec& spec);
CoherentSuperposition build_channel(const ChannelSpec& spec);

// Split an odd cat of amplitude 2^{(M-1)/2} a through a cascade of balanced
// splitters onto M modes; equals build_channel(minus, a, M) up to rounding.
CoherentSuperposition prepare_channel_via_bs(cx alpha, int parties);
FockState prepare_channel_via_bs_fock(cx alpha, int parties,
                                      int cutoff_override = 0);

enum class OutcomeKind { kPerfectSuccess, kCorrectedSuccess, kFailure };

const char* to_string(OutcomeKind k);

struct OutcomeClass {
    OutcomeKind kind = OutcomeKind::kFailure;
    int n = 0;
    int m = 0;
};

// Joint photon-count record (n, m) on the two measured ports.
OutcomeClass classify_outcome(int n, int m, ChannelSign sign);

// Applies the conditional pi phase on every remaining mode when the first
// port is dark (n == 0, m > 0), then classifies.  Total in (n, m).
struct CorrectedAnalytic {
    OutcomeClass cls;
    CoherentSuperposition state;
};
CorrectedAnalytic apply_correction_and_classify(int n, int m, ChannelSign sign,
                                                const CoherentSuperposition& bob);

struct CorrectedFock {
    OutcomeClass cls;
    FockState state;
};
CorrectedFock apply_correction_and_classify(int n, int m, ChannelSign sign,
                                            const FockState& bob);

enum class Engine { kAnalytic, kFock };

struct OutcomeRecord {
    OutcomeClass cls;
    double probability = 0.0;
    double fidelity = 0.0;
};

struct TeleportReport {
    Engine engine = Engine::kAnalytic;
    std::optional<ECSSpec> input;
    std::optional<ChannelSpec> channel;
    std::optional<cx> qubit_a;  // small-alpha run only
    std::optional<cx> qubit_b;
    std::optional<double> channel_limit_fidelity;
    double mass_tolerance = 1e-10;
    std::optional<int> cutoff_override;
    std::vector<OutcomeRecord> outcomes;  // diagonal (n+m, n) order
    double success_probability = 0.0;
    double closed_form_reference = 0.0;
};

struct TeleportOptions {
    double mass_tolerance = 1e-10;
    int max_total = -1;  // joint photon cap; <0 uses default_enumeration_cap()
    std::optional<int> cutoff_override;  // fock engine only
};

TeleportReport teleport_ecs(const ECSSpec& input, const ChannelSpec& channel,
                            Engine engine, const TeleportOptions& opt = {});

// Single-photon-limit protocol: teleports a|00> + b|Psi+> through
// (|100> + |0,Psi+>)/sqrt(2) with two balanced splitters and two counters.
TeleportReport small_alpha_teleport(cx a, cx b);

// Overlap of the three-mode minus channel with its alpha -> 0 limit state.
double channel_limit_fidelity(double alpha, int cutoff = 0);

enum class Parity { kEven, kOdd };
enum class AtomLevel { kGround, kExcited };

struct ParityModel {
    double g = 1.0;            // coupling
    double t = 1.5707963267948966;  // pi/2 over g: theta_n = g t n per level
    AtomLevel atom = AtomLevel::kGround;
};

struct ParityResult {
    Parity parity = Parity::kEven;
    AtomLevel atom = AtomLevel::kGround;
    double probability = 0.0;
    FockState posterior;
};

// Dispersive parity readout of a single-mode field: evolves the joint
// atom-field state for time t, measures the atom, and returns the collapsed
// field with the deterministic photon-number phase compensated.  Without an
// rng the likelier branch is reported (ties break to even).
ParityResult parity_oracle(const FockState& field, const ParityModel& model,
                           std::mt19937_64* rng = nullptr);

}  // namespace ecs
