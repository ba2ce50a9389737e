#include "ecs/protocols.hpp"

#include <cmath>
#include <utility>

namespace ecs {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

cx double_label(cx v) { return (v + v) * kInvSqrt2; }

// |L> and -|L| superposition with explicit weights; terms with zero weight
// are omitted so product states serialize without ghost entries.
CoherentSuperposition signed_pair(cx c_plus, cx c_minus,
                                  const std::vector<cx>& layout) {
    std::vector<CoherentTerm> terms;
    if (c_plus != cx(0.0, 0.0)) terms.push_back({c_plus, layout});
    if (c_minus != cx(0.0, 0.0)) {
        std::vector<cx> neg(layout.size());
        for (std::size_t k = 0; k < layout.size(); ++k) neg[k] = -layout[k];
        terms.push_back({c_minus, std::move(neg)});
    }
    if (terms.empty()) throw ZeroState("both superposition weights are zero");
    return normalize(make_superposition(layout.size(), std::move(terms)));
}

// pi phase on every mode, evaluated exactly as label negation
CoherentSuperposition negate_labels(const CoherentSuperposition& s) {
    CoherentSuperposition out = s;
    for (auto& t : out.terms)
        for (auto& l : t.labels) l = -l;
    return out;
}

// pi phase on every mode of a Fock state: amp *= (-1)^(total photons)
FockState negate_fock(const FockState& s) {
    FockState out = s;
    std::vector<std::size_t> stride(s.cutoffs.size());
    std::size_t acc = 1;
    for (int k = int(s.cutoffs.size()) - 1; k >= 0; --k) {
        stride[std::size_t(k)] = acc;
        acc *= std::size_t(s.cutoffs[std::size_t(k)]);
    }
    for (std::size_t f = 0; f < out.amp.size(); ++f) {
        int total = 0;
        for (std::size_t k = 0; k < stride.size(); ++k)
            total += int((f / stride[k]) % std::size_t(s.cutoffs[k]));
        if (total & 1) out.amp[f] = -out.amp[f];
    }
    return out;
}

std::vector<double> joint_marginal(const FockState& s, std::size_t i,
                                   std::size_t j) {
    std::vector<std::size_t> stride(s.cutoffs.size());
    std::size_t acc = 1;
    for (int k = int(s.cutoffs.size()) - 1; k >= 0; --k) {
        stride[std::size_t(k)] = acc;
        acc *= std::size_t(s.cutoffs[std::size_t(k)]);
    }
    const std::size_t ki = std::size_t(s.cutoffs[i]), kj = std::size_t(s.cutoffs[j]);
    std::vector<double> p(ki * kj, 0.0);
    for (std::size_t f = 0; f < s.amp.size(); ++f) {
        double w = std::norm(s.amp[f]);
        if (w == 0.0) continue;
        p[((f / stride[i]) % ki) * kj + (f / stride[j]) % kj] += w;
    }
    return p;
}

void check_pair(const ECSSpec& input, const ChannelSpec& channel) {
    if (input.parties < 2)
        throw Error("teleport input needs at least two parties");
    if (channel.parties != input.parties + 1)
        throw ParityMismatch("channel must carry one more party than the input");
    if (!(input.alpha == channel.alpha))
        throw AlphaMismatch("input and channel amplitudes must match exactly");
    bool ok = channel.label_layout.size() == input.label_layout.size() + 1;
    for (std::size_t k = 0; ok && k < input.label_layout.size(); ++k)
        ok = channel.label_layout[k + 1] == input.label_layout[k];
    ok = ok && channel.label_layout[0] == double_label(input.label_layout[0]);
    if (!ok)
        throw ParityMismatch("channel layout is not the splitter image of the input layout");
}

TeleportReport teleport_analytic(const ECSSpec& input, const ChannelSpec& channel,
                                 const TeleportOptions& opt) {
    const int n_in = input.parties;
    const std::size_t p1 = std::size_t(n_in) - 1; // merged input mode
    const std::size_t p2 = std::size_t(n_in);     // channel head
    CoherentSuperposition in = build_ecs(input);
    CoherentSuperposition st = tensor(in, build_channel(channel));
    for (int j = n_in - 2; j >= 0; --j)
        st = apply_balanced_bs(st, p1, std::size_t(j));
    for (const auto& t : st.terms)
        for (std::size_t j = 0; j < p1; ++j)
            if (t.labels[j] != cx(0.0, 0.0))
                throw Error("interference cascade left residue on an emptied mode");
    st = apply_balanced_bs(st, p1, p2);
    auto dist = measurement_distribution(st, p1, p2, opt.mass_tolerance,
                                         opt.max_total);

    CoherentSuperposition vac;
    vac.mode_count = p1;
    vac.terms.push_back({cx(1.0, 0.0), std::vector<cx>(p1, cx(0.0, 0.0))});
    vac.normalized = true;
    CoherentSuperposition target = tensor(vac, in);

    TeleportReport rep;
    rep.engine = Engine::kAnalytic;
    rep.input = input;
    rep.channel = channel;
    rep.mass_tolerance = opt.mass_tolerance;
    for (const auto& o : dist) {
        auto corr = apply_correction_and_classify(o.n, o.m, channel.sign, o.residual);
        double fid = std::norm(overlap(corr.state, target)) / o.probability;
        rep.outcomes.push_back({corr.cls, o.probability, fid});
        if (corr.cls.kind != OutcomeKind::kFailure)
            rep.success_probability += o.probability;
    }
    rep.closed_form_reference = success_prob_reference(
        channel.sign, std::abs(input.alpha), input.parties);
    return rep;
}

TeleportReport teleport_fock(const ECSSpec& input, const ChannelSpec& channel,
                             const TeleportOptions& opt) {
    const int n_in = input.parties;
    const double a2 = std::norm(input.alpha);
    const int km = opt.cutoff_override ? *opt.cutoff_override
                                       : cutoff_for(std::ldexp(a2, n_in));
    const int kin = opt.cutoff_override ? *opt.cutoff_override
                                        : cutoff_for(std::ldexp(a2, n_in - 1));
    if (km < 2) throw CutoffTooSmall("cutoff override below two levels");

    CoherentSuperposition in = build_ecs(input);
    FockState reg = to_fock(in, std::vector<int>(std::size_t(n_in), kin)).state;
    const std::size_t p1 = std::size_t(n_in) - 1;
    for (int j = n_in - 2; j >= 0; --j)
        reg = apply_two_mode_bs(reg, p1, std::size_t(j), BsVariant::kBalanced);
    for (int j = 0; j + 1 < n_in; ++j) {
        auto pr = project_mode_number(reg, 0, 0);
        if (pr.weight < 0.9)
            throw Error("interference cascade left residue on an emptied mode");
        reg = std::move(pr.rest);
    }
    reg = pad_mode(reg, 0, km);

    std::vector<int> ch_cut(std::size_t(n_in) + 1);
    ch_cut[0] = km;
    for (int k = 1; k <= n_in; ++k)
        ch_cut[std::size_t(k)] =
            opt.cutoff_override
                ? *opt.cutoff_override
                : cutoff_for(std::norm(channel.label_layout[std::size_t(k)]));
    FockState ch = to_fock(build_channel(channel), ch_cut).state;
    FockState st = normalize(tensor(reg, ch));
    st = apply_two_mode_bs(st, 0, 1, BsVariant::kBalanced);

    std::vector<int> leg_cut(ch_cut.begin() + 1, ch_cut.end());
    FockState target = to_fock(in, leg_cut).state;

    TeleportReport rep;
    rep.engine = Engine::kFock;
    rep.input = input;
    rep.channel = channel;
    rep.mass_tolerance = opt.mass_tolerance;
    rep.cutoff_override = opt.cutoff_override;

    auto pnm = joint_marginal(st, 0, 1);
    const int k0 = st.cutoffs[0], k1 = st.cutoffs[1];
    const int cap = opt.max_total >= 0 ? opt.max_total : default_enumeration_cap();
    double cum = 0.0;
    for (int total = 0; total <= k0 + k1 - 2; ++total) {
        if (total > cap)
            throw NonConvergence("outcome enumeration exceeded the photon cap");
        for (int n = std::max(0, total - k1 + 1); n <= std::min(total, k0 - 1); ++n) {
            const int m = total - n;
            const double p = pnm[std::size_t(n) * std::size_t(k1) + std::size_t(m)];
            cum += p;
            if (p <= 1e-20) continue;
            auto s1 = project_mode_number(st, 0, n);
            auto s2 = project_mode_number(s1.rest, 0, m);
            auto corr = apply_correction_and_classify(n, m, channel.sign, s2.rest);
            double fid = fidelity(corr.state, target);
            rep.outcomes.push_back({corr.cls, p, fid});
            if (corr.cls.kind != OutcomeKind::kFailure)
                rep.success_probability += p;
        }
        if (cum >= 1.0 - opt.mass_tolerance) break;
    }
    if (cum < 1.0 - opt.mass_tolerance)
        throw NonConvergence("outcome mass never reached the requested tolerance");
    rep.closed_form_reference = success_prob_reference(
        channel.sign, std::abs(input.alpha), input.parties);
    return rep;
}

} // namespace

std::vector<cx> chain_layout(cx alpha, int modes) {
    if (modes < 1) throw Error("layout needs at least one mode");
    std::vector<cx> labels(static_cast<std::size_t>(modes));
    labels[std::size_t(modes) - 1] = alpha;
    if (modes >= 2) labels[std::size_t(modes) - 2] = alpha;
    for (int k = modes - 3; k >= 0; --k)
        labels[std::size_t(k)] = double_label(labels[std::size_t(k) + 1]);
    return labels;
}

ECSSpec ECSSpec::make(cx eps_plus, cx eps_minus, cx alpha, int parties) {
    if (parties < 1) throw Error("input needs at least one party");
    if (eps_plus == cx(0.0, 0.0) && eps_minus == cx(0.0, 0.0))
        throw ZeroState("both superposition weights are zero");
    ECSSpec s;
    s.eps_plus = eps_plus;
    s.eps_minus = eps_minus;
    s.alpha = alpha;
    s.parties = parties;
    s.label_layout = chain_layout(alpha, parties);
    return s;
}

ChannelSpec ChannelSpec::make(ChannelSign sign, cx alpha, int parties) {
    if (parties < 2) throw Error("channel needs at least two parties");
    ChannelSpec s;
    s.sign = sign;
    s.alpha = alpha;
    s.parties = parties;
    s.label_layout = chain_layout(alpha, parties);
    return s;
}

CoherentSuperposition build_cat(cx eps_plus, cx eps_minus, cx alpha) {
    return signed_pair(eps_plus, eps_minus, {alpha});
}

CoherentSuperposition build_ecs(const ECSSpec& spec) {
    return signed_pair(spec.eps_plus, spec.eps_minus, spec.label_layout);
}

CoherentSuperposition build_channel(const ChannelSpec& spec) {
    cx c_minus = spec.sign == ChannelSign::kMinus ? cx(-1.0, 0.0) : cx(1.0, 0.0);
    return signed_pair(cx(1.0, 0.0), c_minus, spec.label_layout);
}

CoherentSuperposition prepare_channel_via_bs(cx alpha, int parties) {
    if (parties < 2) throw Error("cascade needs at least two modes");
    std::vector<cx> source(std::size_t(parties), cx(0.0, 0.0));
    source[0] = double_label(chain_layout(alpha, parties)[0]);
    CoherentSuperposition st = signed_pair(cx(1.0, 0.0), cx(-1.0, 0.0), source);
    for (int k = 0; k + 1 < parties; ++k)
        st = apply_balanced_bs(st, std::size_t(k), std::size_t(k) + 1);
    return st;
}

FockState prepare_channel_via_bs_fock(cx alpha, int parties, int cutoff_override) {
    if (parties < 2) throw Error("cascade needs at least two modes");
    std::vector<cx> source(std::size_t(parties), cx(0.0, 0.0));
    source[0] = double_label(chain_layout(alpha, parties)[0]);
    const int k = cutoff_override > 0 ? cutoff_override
                                      : cutoff_for(std::norm(source[0]));
    CoherentSuperposition src = signed_pair(cx(1.0, 0.0), cx(-1.0, 0.0), source);
    // uniform cutoff: every cascade pair must share its dimension
    FockState st = to_fock(src, std::vector<int>(std::size_t(parties), k)).state;
    for (int j = 0; j + 1 < parties; ++j)
        st = apply_two_mode_bs(st, std::size_t(j), std::size_t(j) + 1,
                               BsVariant::kBalanced);
    return st;
}

const char* to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::kPerfectSuccess: return "PerfectSuccess";
        case OutcomeKind::kCorrectedSuccess: return "CorrectedSuccess";
        default: return "Failure";
    }
}

OutcomeClass classify_outcome(int n, int m, ChannelSign sign) {
    if (n < 0 || m < 0) throw Error("photon counts must be nonnegative");
    OutcomeClass c;
    c.n = n;
    c.m = m;
    c.kind = OutcomeKind::kFailure;
    if ((n == 0) == (m == 0)) return c; // both dark or both lit: unrecoverable
    const int total = n + m;
    const bool want_odd = sign == ChannelSign::kMinus;
    if ((total % 2 == 1) == want_odd)
        c.kind = m == 0 ? OutcomeKind::kPerfectSuccess
                        : OutcomeKind::kCorrectedSuccess;
    return c;
}

CorrectedAnalytic apply_correction_and_classify(int n, int m, ChannelSign sign,
                                                const CoherentSuperposition& bob) {
    CorrectedAnalytic out{classify_outcome(n, m, sign), bob};
    if (n == 0 && m > 0) out.state = negate_labels(bob);
    return out;
}

CorrectedFock apply_correction_and_classify(int n, int m, ChannelSign sign,
                                            const FockState& bob) {
    CorrectedFock out{classify_outcome(n, m, sign), bob};
    if (n == 0 && m > 0) out.state = negate_fock(bob);
    return out;
}

TeleportReport teleport_ecs(const ECSSpec& input, const ChannelSpec& channel,
                            Engine engine, const TeleportOptions& opt) {
    check_pair(input, channel);
    if (!(opt.mass_tolerance > 0.0) || opt.mass_tolerance >= 1.0)
        throw Error("mass tolerance must lie in (0, 1)");
    return engine == Engine::kAnalytic ? teleport_analytic(input, channel, opt)
                                       : teleport_fock(input, channel, opt);
}

TeleportReport small_alpha_teleport(cx a, cx b) {
    if (std::norm(a) + std::norm(b) < 1e-30)
        throw ZeroState("qubit amplitudes are both zero");
    const int k = 3; // holds up to two photons per mode
    const double r = kInvSqrt2;

    FockState in = fock_zero({k, k});
    in.amp[0] = a;                      // a|00>
    in.amp[1] = b * r;                  // b/sqrt2 |01>
    in.amp[std::size_t(k)] = b * r;     // b/sqrt2 |10>
    in = normalize(in);

    FockState ch = fock_zero({k, k, k});
    ch.amp[std::size_t(k) * std::size_t(k)] = r; // |100>/sqrt2
    ch.amp[std::size_t(k)] = 0.5;                // |010>/2
    ch.amp[1] = 0.5;                             // |001>/2
    ch.normalized = true;

    FockState st = tensor(in, ch);
    st = apply_two_mode_bs(st, 0, 1, BsVariant::kBalanced);
    st = apply_two_mode_bs(st, 0, 2, BsVariant::kBalanced);

    // counters sit on modes 0 and 2; bob keeps (1, 3, 4) with 1 left vacuum
    FockState target = tensor(fock_basis({k}, {0}), in);

    TeleportReport rep;
    rep.engine = Engine::kFock;
    rep.qubit_a = a;
    rep.qubit_b = b;
    rep.mass_tolerance = 0.0; // exhaustive enumeration
    auto pnm = joint_marginal(st, 0, 2);
    for (int total = 0; total <= 2 * (k - 1); ++total)
        for (int n = std::max(0, total - k + 1); n <= std::min(total, k - 1); ++n) {
            const int m = total - n;
            const double p = pnm[std::size_t(n) * std::size_t(k) + std::size_t(m)];
            if (p <= 1e-20) continue;
            auto s1 = project_mode_number(st, 0, n);
            auto s2 = project_mode_number(s1.rest, 1, m);
            auto corr = apply_correction_and_classify(n, m, ChannelSign::kMinus,
                                                      s2.rest);
            double fid = fidelity(corr.state, target);
            rep.outcomes.push_back({corr.cls, p, fid});
            if (corr.cls.kind != OutcomeKind::kFailure)
                rep.success_probability += p;
        }
    rep.closed_form_reference = 0.5;
    return rep;
}

double channel_limit_fidelity(double alpha, int cutoff) {
    const int k = cutoff > 0 ? cutoff
                             : std::max(3, cutoff_for(2.0 * alpha * alpha));
    ChannelSpec spec = ChannelSpec::make(ChannelSign::kMinus, cx(alpha, 0.0), 3);
    FockState ch = to_fock(build_channel(spec), k).state;

    FockState lim = fock_zero({k, k, k});
    lim.amp[std::size_t(k) * std::size_t(k)] = kInvSqrt2; // |100>/sqrt2
    lim.amp[std::size_t(k)] = 0.5;                        // |010>/2
    lim.amp[1] = 0.5;                                     // |001>/2
    lim.normalized = true;
    return fidelity(ch, lim);
}

ParityResult parity_oracle(const FockState& field, const ParityModel& model,
                           std::mt19937_64* rng) {
    if (field.mode_count() != 1)
        throw BadModeIndex("parity oracle expects a single-mode field");
    if (!(model.g > 0.0) || !(model.t > 0.0))
        throw Error("coupling and interaction time must be positive");
    if (std::abs(model.g * model.t - kHalfPi) > 1e-12)
        throw Error("interaction must realize a quarter rotation per photon");
    if (model.atom != AtomLevel::kGround)
        throw Error("the oracle starts with the atom in the ground level");
    const double n2 = fock_norm2(field);
    if (n2 < 1e-30) throw ZeroState("empty field");
    if (1.0 - n2 > 1e-3)
        throw CutoffTooSmall("field loses over 0.1% of its weight to truncation");

    // Per level the coupling rotates the atom by pi*n/2 about x:
    //   |g,n> -> cos(pi n/2)|g,n> - i sin(pi n/2)|e,n>
    // On either branch the surviving amplitude is c_n * i^{-n}; a quarter-wave
    // phase shifter (+pi/2 per photon) undoes it, leaving the plain parity
    // projection. All factors are exact by quarter-angle tables.
    const int levels = field.cutoffs[0];
    double even_mass = 0.0, odd_mass = 0.0;
    for (int n = 0; n < levels; ++n) {
        const double w = std::norm(field.amp[std::size_t(n)]);
        (n % 2 == 0 ? even_mass : odd_mass) += w;
    }
    const double p_even = even_mass / n2;
    const double p_odd = odd_mass / n2;

    bool even;
    if (rng) {
        even = std::uniform_real_distribution<double>(0.0, 1.0)(*rng) < p_even;
    } else {
        even = p_even >= p_odd;
    }

    ParityResult res;
    res.parity = even ? Parity::kEven : Parity::kOdd;
    res.atom = even ? AtomLevel::kGround : AtomLevel::kExcited;
    res.probability = even ? p_even : p_odd;
    FockState post = field;
    for (int n = 0; n < levels; ++n)
        if ((n % 2 == 0) != even) post.amp[std::size_t(n)] = cx(0.0, 0.0);
    res.posterior = normalize(post);
    return res;
}

} // namespace ecs
