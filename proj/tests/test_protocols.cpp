#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <random>

#include "ecs/protocols.hpp"

using namespace ecs;

namespace {

cx dbl(cx v) { return (v + v) * kInvSqrt2; }

const OutcomeRecord* find_outcome(const TeleportReport& r, int n, int m) {
    for (const auto& o : r.outcomes)
        if (o.cls.n == n && o.cls.m == m) return &o;
    return nullptr;
}

} // namespace

TEST_CASE("chain layout doubles toward the head") {
    cx a(0.7, -0.2);
    auto l2 = chain_layout(a, 2);
    REQUIRE(l2.size() == 2);
    CHECK(l2[0] == a);
    CHECK(l2[1] == a);

    auto l3 = chain_layout(a, 3);
    CHECK(l3[0] == dbl(a));
    CHECK(l3[1] == a);
    CHECK(l3[2] == a);

    auto l4 = chain_layout(a, 4);
    CHECK(l4[0] == dbl(dbl(a)));
    CHECK(l4[1] == dbl(a));
    CHECK(std::abs(l4[0] - 2.0 * a) < 1e-15);
    CHECK(std::abs(l4[1] - std::sqrt(2.0) * a) < 1e-15);

    CHECK_THROWS_AS(chain_layout(a, 0), Error);
}

TEST_CASE("cat builder") {
    auto coh = build_cat(1.0, 0.0, cx(0.8, 0.1));
    REQUIRE(coh.terms.size() == 1);
    CHECK(std::abs(coh.terms[0].coeff - cx(1.0, 0.0)) < 1e-15);
    CHECK(coh.terms[0].labels[0] == cx(0.8, 0.1));

    auto odd = build_cat(1.0, -1.0, 1.0);
    CHECK(std::abs(overlap(odd, odd) - 1.0) < 1e-12);

    CHECK_THROWS_AS(build_cat(1.0, -1.0, 0.0), NearSingularState);
    CHECK_THROWS_AS(build_cat(0.0, 0.0, 1.0), ZeroState);
}

TEST_CASE("ecs builder") {
    auto prod = build_ecs(ECSSpec::make(1.0, 0.0, 1.0, 2));
    REQUIRE(prod.terms.size() == 1);
    CHECK(prod.terms[0].labels[0] == cx(1.0, 0.0));
    CHECK(prod.terms[0].labels[1] == cx(1.0, 0.0));

    // squared norm before normalization: 2 + 2 e^{-4 alpha^2}
    CoherentSuperposition raw = make_superposition(
        2, {{cx(1.0, 0.0), {cx(1.0, 0.0), cx(1.0, 0.0)}},
            {cx(1.0, 0.0), {cx(-1.0, 0.0), cx(-1.0, 0.0)}}});
    CHECK(squared_norm(raw) == doctest::Approx(2.0366312777774684).epsilon(1e-14));

    // tripartite ecs with (1,-1) weights matches the minus channel
    auto e3 = build_ecs(ECSSpec::make(1.0, -1.0, 0.9, 3));
    auto ch = build_channel(ChannelSpec::make(ChannelSign::kMinus, 0.9, 3));
    CHECK(std::abs(overlap(e3, ch)) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(ECSSpec::make(0.0, 0.0, 1.0, 2), ZeroState);
}

TEST_CASE("channel builder edge cases") {
    CHECK_THROWS_AS(build_channel(ChannelSpec::make(ChannelSign::kMinus, 0.0, 3)),
                    NearSingularState);
    auto plus0 = build_channel(ChannelSpec::make(ChannelSign::kPlus, 0.0, 3));
    CHECK(std::abs(overlap(plus0, plus0) - 1.0) < 1e-12);
    CHECK_THROWS_AS(ChannelSpec::make(ChannelSign::kMinus, 1.0, 1), Error);
}

TEST_CASE("splitter cascade prepares the minus channel") {
    for (double alpha : {0.3, 1.0, 2.0}) {
        for (int parties : {2, 3, 4, 5}) {
            auto prepared = prepare_channel_via_bs(alpha, parties);
            auto direct = build_channel(
                ChannelSpec::make(ChannelSign::kMinus, alpha, parties));
            CHECK(std::abs(overlap(prepared, direct)) ==
                  doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(prepare_channel_via_bs(0.0, 3), NearSingularState);
}

TEST_CASE("fock cascade agrees with the analytic channel") {
    const int parties = 3;
    FockState prep = prepare_channel_via_bs_fock(1.0, parties);
    auto direct = to_fock(
        build_channel(ChannelSpec::make(ChannelSign::kMinus, 1.0, parties)),
        prep.cutoffs);
    CHECK(fidelity(prep, direct.state) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("outcome classification") {
    auto kind = [](int n, int m, ChannelSign s) {
        return classify_outcome(n, m, s).kind;
    };
    const auto P = OutcomeKind::kPerfectSuccess;
    const auto C = OutcomeKind::kCorrectedSuccess;
    const auto F = OutcomeKind::kFailure;
    const auto MINUS = ChannelSign::kMinus;
    const auto PLUS = ChannelSign::kPlus;

    CHECK(kind(1, 0, MINUS) == P);
    CHECK(kind(3, 0, MINUS) == P);
    CHECK(kind(0, 3, MINUS) == C);
    CHECK(kind(0, 1, MINUS) == C);
    CHECK(kind(2, 0, MINUS) == F);
    CHECK(kind(0, 2, MINUS) == F);
    CHECK(kind(0, 0, MINUS) == F);
    CHECK(kind(1, 1, MINUS) == F);
    CHECK(kind(2, 3, MINUS) == F);

    CHECK(kind(2, 0, PLUS) == P);
    CHECK(kind(4, 0, PLUS) == P);
    CHECK(kind(0, 2, PLUS) == C);
    CHECK(kind(1, 0, PLUS) == F);
    CHECK(kind(0, 1, PLUS) == F);
    CHECK(kind(0, 0, PLUS) == F);

    CHECK_THROWS_AS(classify_outcome(-1, 0, MINUS), Error);
}

TEST_CASE("correction negates labels only for a dark first port") {
    CoherentSuperposition bob = make_superposition(
        2, {{cx(1.0, 0.0), {cx(0.5, 0.0), cx(0.5, 0.0)}}});
    auto kept = apply_correction_and_classify(3, 0, ChannelSign::kMinus, bob);
    CHECK(kept.cls.kind == OutcomeKind::kPerfectSuccess);
    CHECK(kept.state.terms[0].labels[0] == cx(0.5, 0.0));

    auto flipped = apply_correction_and_classify(0, 3, ChannelSign::kMinus, bob);
    CHECK(flipped.cls.kind == OutcomeKind::kCorrectedSuccess);
    CHECK(flipped.state.terms[0].labels[0] == cx(-0.5, 0.0));
    CHECK(flipped.state.terms[0].labels[1] == cx(-0.5, 0.0));

    FockState fb = fock_basis({3, 3}, {0, 1});
    auto ffl = apply_correction_and_classify(0, 1, ChannelSign::kMinus, fb);
    CHECK(ffl.state.amp[1] == cx(-1.0, 0.0));
    auto fkept = apply_correction_and_classify(1, 0, ChannelSign::kMinus, fb);
    CHECK(fkept.state.amp[1] == cx(1.0, 0.0));
}

TEST_CASE("minus-channel teleport succeeds half the time at unit fidelity") {
    const std::vector<std::pair<cx, cx>> eps = {
        {cx(1.0, 0.0), cx(1.0, 0.0)},
        {cx(1.0, 0.0), cx(-1.0, 0.0)},
        {cx(0.3, 0.0), cx(0.6, 0.4)},
    };
    for (double alpha : {0.25, 0.5, 1.0, 2.0}) {
        for (const auto& [ep, em] : eps) {
            auto rep = teleport_ecs(
                ECSSpec::make(ep, em, alpha, 2),
                ChannelSpec::make(ChannelSign::kMinus, alpha, 3),
                Engine::kAnalytic);
            CHECK(rep.success_probability == doctest::Approx(0.5).epsilon(1e-9));
            CHECK(rep.closed_form_reference == 0.5);
            double mass = 0.0;
            for (const auto& o : rep.outcomes) {
                mass += o.probability;
                if (o.cls.kind != OutcomeKind::kFailure)
                    CHECK(o.fidelity == doctest::Approx(1.0).epsilon(1e-9));
            }
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("teleport outcome stream is diagonally ordered") {
    auto rep = teleport_ecs(ECSSpec::make(1.0, 1.0, 1.0, 2),
                            ChannelSpec::make(ChannelSign::kMinus, 1.0, 3),
                            Engine::kAnalytic);
    REQUIRE(!rep.outcomes.empty());
    long prev = -1;
    for (const auto& o : rep.outcomes) {
        long key = long(o.cls.n + o.cls.m) * 100000 + o.cls.n;
        CHECK(key > prev);
        prev = key;
        CHECK(o.probability >= 0.0);
        CHECK(o.probability <= 1.0 + 1e-12);
    }
    // joint counts on both ports are never simultaneously positive
    for (const auto& o : rep.outcomes)
        CHECK((o.cls.n == 0 || o.cls.m == 0));
}

TEST_CASE("minus-channel per-outcome probabilities match the closed form") {
    // odd n: P(n,0) = P(0,n) = e^{-4a^2} (2a)^{2n} / (2 n! (1 - e^{-8a^2}));
    // even n carries the extra odd-input factor (1+e^{-4a^2})/(1-e^{-4a^2})
    const double alpha = 1.0;
    auto rep = teleport_ecs(ECSSpec::make(1.0, -1.0, alpha, 2),
                            ChannelSpec::make(ChannelSign::kMinus, alpha, 3),
                            Engine::kAnalytic);
    const double y = std::exp(-4.0);
    double fact = 1.0;
    for (int n = 1; n <= 6; ++n) {
        fact *= n;
        double expect = std::exp(-4.0) * std::pow(2.0, 2 * n) /
                        (2.0 * fact * (1.0 - std::exp(-8.0)));
        if (n % 2 == 0) expect *= (1.0 + y) / (1.0 - y);
        const auto* a = find_outcome(rep, n, 0);
        const auto* b = find_outcome(rep, 0, n);
        REQUIRE(a != nullptr);
        REQUIRE(b != nullptr);
        CHECK(a->probability == doctest::Approx(expect).epsilon(1e-10));
        CHECK(b->probability == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("plus-channel teleport follows its closed form") {
    for (double alpha : {0.3, 1.0, 1.7}) {
        auto rep = teleport_ecs(ECSSpec::make(0.8, 0.6, alpha, 2),
                                ChannelSpec::make(ChannelSign::kPlus, alpha, 3),
                                Engine::kAnalytic);
        double expect = success_prob_closed_form(ChannelSign::kPlus, alpha);
        CHECK(std::abs(rep.success_probability - expect) < 1e-8);
        CHECK(rep.closed_form_reference == doctest::Approx(expect).epsilon(1e-14));
    }
    CHECK(success_prob_closed_form(ChannelSign::kPlus, 1.0) ==
          doctest::Approx(0.48169050326315673).epsilon(1e-14));

    // weights of the input superposition do not move the success rate
    auto r1 = teleport_ecs(ECSSpec::make(1.0, 0.0, 0.9, 2),
                           ChannelSpec::make(ChannelSign::kPlus, 0.9, 3),
                           Engine::kAnalytic);
    auto r2 = teleport_ecs(ECSSpec::make(0.2, cx(0.5, 0.7), 0.9, 2),
                           ChannelSpec::make(ChannelSign::kPlus, 0.9, 3),
                           Engine::kAnalytic);
    CHECK(r1.success_probability ==
          doctest::Approx(r2.success_probability).epsilon(1e-12));
}

TEST_CASE("even-count minus branches stay below unit fidelity") {
    auto rep = teleport_ecs(ECSSpec::make(0.3, cx(0.6, 0.4), 1.0, 2),
                            ChannelSpec::make(ChannelSign::kMinus, 1.0, 3),
                            Engine::kAnalytic);
    int seen = 0;
    for (const auto& o : rep.outcomes) {
        int total = o.cls.n + o.cls.m;
        if (o.cls.kind == OutcomeKind::kFailure && total > 0 && total % 2 == 0 &&
            (o.cls.n == 0 || o.cls.m == 0)) {
            CHECK(o.fidelity < 1.0 - 1e-6);
            ++seen;
        }
    }
    CHECK(seen >= 2);
}

TEST_CASE("tripartite teleport through the four-party channel") {
    for (double alpha : {0.5, 0.8}) {
        auto rep = teleport_ecs(ECSSpec::make(1.0, 1.0, alpha, 3),
                                ChannelSpec::make(ChannelSign::kMinus, alpha, 4),
                                Engine::kAnalytic);
        CHECK(rep.success_probability == doctest::Approx(0.5).epsilon(1e-9));
        for (const auto& o : rep.outcomes)
            if (o.cls.kind != OutcomeKind::kFailure)
                CHECK(o.fidelity == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("cascade empties every interfered mode exactly") {
    auto in = build_ecs(ECSSpec::make(0.7, cx(-0.2, 0.5), 1.0, 3));
    auto ch = build_channel(ChannelSpec::make(ChannelSign::kMinus, 1.0, 4));
    auto st = tensor(in, ch);
    st = apply_balanced_bs(st, 2, 1);
    st = apply_balanced_bs(st, 2, 0);
    for (const auto& t : st.terms) {
        CHECK(t.labels[0] == cx(0.0, 0.0));
        CHECK(t.labels[1] == cx(0.0, 0.0));
    }
}

TEST_CASE("teleport validates its inputs") {
    auto in = ECSSpec::make(1.0, 1.0, 1.0, 2);
    CHECK_THROWS_AS(
        teleport_ecs(in, ChannelSpec::make(ChannelSign::kMinus, 1.0, 4),
                     Engine::kAnalytic),
        ParityMismatch);
    CHECK_THROWS_AS(
        teleport_ecs(in, ChannelSpec::make(ChannelSign::kMinus, 1.1, 3),
                     Engine::kAnalytic),
        AlphaMismatch);
    auto bad = ChannelSpec::make(ChannelSign::kMinus, 1.0, 3);
    bad.label_layout[1] = cx(0.9, 0.0);
    CHECK_THROWS_AS(teleport_ecs(in, bad, Engine::kAnalytic), ParityMismatch);
    TeleportOptions opt;
    opt.mass_tolerance = 0.0;
    CHECK_THROWS_AS(teleport_ecs(in, ChannelSpec::make(ChannelSign::kMinus, 1.0, 3),
                                 Engine::kAnalytic, opt),
                    Error);
}

TEST_CASE("fock teleport reproduces the analytic report") {
    const double alpha = 0.8;
    auto in = ECSSpec::make(1.0, 1.0, alpha, 2);
    auto ch = ChannelSpec::make(ChannelSign::kMinus, alpha, 3);
    auto ra = teleport_ecs(in, ch, Engine::kAnalytic);
    auto rf = teleport_ecs(in, ch, Engine::kFock);
    CHECK(rf.engine == Engine::kFock);
    CHECK(rf.success_probability ==
          doctest::Approx(ra.success_probability).epsilon(1e-6));

    std::map<std::pair<int, int>, double> pa;
    for (const auto& o : ra.outcomes)
        pa[{o.cls.n, o.cls.m}] = o.probability;
    int compared = 0;
    for (const auto& o : rf.outcomes) {
        auto it = pa.find({o.cls.n, o.cls.m});
        if (it == pa.end()) {
            CHECK(o.probability < 1e-8);
            continue;
        }
        CHECK(std::abs(o.probability - it->second) < 1e-6);
        ++compared;
        if (o.cls.kind != OutcomeKind::kFailure)
            CHECK(o.fidelity == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(compared >= 10);
}

TEST_CASE("small-amplitude protocol teleports a photonic qubit") {
    const std::vector<std::pair<cx, cx>> qubits = {
        {cx(1.0, 0.0), cx(0.0, 0.0)},
        {cx(0.0, 0.0), cx(1.0, 0.0)},
        {cx(0.6, 0.0), cx(0.0, 0.8)},
    };
    for (const auto& [a, b] : qubits) {
        auto rep = small_alpha_teleport(a, b);
        CHECK(rep.engine == Engine::kFock);
        REQUIRE(rep.qubit_a.has_value());
        CHECK(*rep.qubit_a == a);
        CHECK(rep.closed_form_reference == 0.5);
        CHECK(rep.success_probability == doctest::Approx(0.5).epsilon(1e-12));
        const auto* perfect = find_outcome(rep, 1, 0);
        const auto* corrected = find_outcome(rep, 0, 1);
        REQUIRE(perfect != nullptr);
        REQUIRE(corrected != nullptr);
        CHECK(perfect->cls.kind == OutcomeKind::kPerfectSuccess);
        CHECK(corrected->cls.kind == OutcomeKind::kCorrectedSuccess);
        CHECK(perfect->probability == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(corrected->probability == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(perfect->fidelity == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(corrected->fidelity == doctest::Approx(1.0).epsilon(1e-12));
        double mass = 0.0;
        for (const auto& o : rep.outcomes) mass += o.probability;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }

    // a pure |Psi+> input dumps the two-photon branches into |00> on failure
    auto rep = small_alpha_teleport(0.0, 1.0);
    const auto* f20 = find_outcome(rep, 2, 0);
    REQUIRE(f20 != nullptr);
    CHECK(f20->cls.kind == OutcomeKind::kFailure);
    CHECK(f20->fidelity < 1e-9);

    CHECK_THROWS_AS(small_alpha_teleport(0.0, 0.0), ZeroState);
}

TEST_CASE("three-mode channel factors into cat-times-pair states") {
    // |chain>^- == (|h>^- |a;a>^+ + |h>^+ |a;a>^-)/sqrt2 with h the chain head
    const double alpha = 0.8;
    cx a(alpha, 0.0);
    cx h = dbl(a);
    auto channel = build_channel(ChannelSpec::make(ChannelSign::kMinus, a, 3));

    auto catm = build_cat(1.0, -1.0, h);
    auto catp = build_cat(1.0, 1.0, h);
    auto pairp = build_ecs(ECSSpec::make(1.0, 1.0, a, 2));
    auto pairm = build_ecs(ECSSpec::make(1.0, -1.0, a, 2));

    auto t1 = tensor(catm, pairp);
    auto t2 = tensor(catp, pairm);
    std::vector<CoherentTerm> terms;
    for (const auto& t : t1.terms) terms.push_back({t.coeff * kInvSqrt2, t.labels});
    for (const auto& t : t2.terms) terms.push_back({t.coeff * kInvSqrt2, t.labels});
    auto combo = make_superposition(3, std::move(terms));
    CHECK(std::abs(overlap(channel, combo)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(squared_norm(combo) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("channel limit fidelity approaches one quadratically") {
    CHECK(channel_limit_fidelity(1e-3) >= 0.999999);
    CHECK(channel_limit_fidelity(0.3) ==
          doctest::Approx(0.97872218748995753).epsilon(1e-9));
    CHECK(channel_limit_fidelity(0.8) ==
          doctest::Approx(0.39817980268688045).epsilon(1e-9));
    CHECK(channel_limit_fidelity(1e-3) > channel_limit_fidelity(0.3));
    CHECK(channel_limit_fidelity(0.3) > channel_limit_fidelity(0.8));
}

TEST_CASE("parity oracle separates even and odd photon numbers") {
    for (int n = 0; n <= 40; ++n) {
        FockState f = fock_basis({41}, {n});
        auto res = parity_oracle(f, ParityModel{});
        CHECK(res.parity == (n % 2 == 0 ? Parity::kEven : Parity::kOdd));
        CHECK(res.atom ==
              (n % 2 == 0 ? AtomLevel::kGround : AtomLevel::kExcited));
        CHECK(res.probability == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fidelity(res.posterior, f) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("parity oracle projects superposed fields") {
    const double alpha = 0.9;
    auto even_cat = to_fock(build_cat(1.0, 1.0, alpha), cutoff_for(alpha * alpha));
    auto res = parity_oracle(even_cat.state, ParityModel{});
    CHECK(res.parity == Parity::kEven);
    CHECK(res.probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity(res.posterior, even_cat.state) ==
          doctest::Approx(1.0).epsilon(1e-12));

    auto odd_cat = to_fock(build_cat(1.0, -1.0, alpha), cutoff_for(alpha * alpha));
    auto odd = parity_oracle(odd_cat.state, ParityModel{});
    CHECK(odd.parity == Parity::kOdd);
    CHECK(odd.atom == AtomLevel::kExcited);
    CHECK(odd.probability == doctest::Approx(1.0).epsilon(1e-12));

    // coherent field: even weight (1+e^{-2 a^2})/2 wins for the silent oracle
    auto coh = coherent_fock(1.0, 18);
    auto deterministic = parity_oracle(coh, ParityModel{});
    CHECK(deterministic.parity == Parity::kEven);
    CHECK(deterministic.probability ==
          doctest::Approx(0.56766764161830635).epsilon(1e-9));
    // posterior holds only even levels
    for (int n = 1; n < 18; n += 2)
        CHECK(std::abs(deterministic.posterior.amp[std::size_t(n)]) < 1e-15);

    std::mt19937_64 rng(0x5eed5eed);
    for (int trial = 0; trial < 32; ++trial) {
        auto sampled = parity_oracle(coh, ParityModel{}, &rng);
        bool even = sampled.parity == Parity::kEven;
        CHECK(sampled.atom ==
              (even ? AtomLevel::kGround : AtomLevel::kExcited));
        CHECK(sampled.probability ==
              doctest::Approx(even ? 0.56766764161830635 : 0.43233235838169365)
                  .epsilon(1e-9));
    }
}

TEST_CASE("parity oracle validates model and field") {
    FockState two = fock_basis({3, 3}, {0, 0});
    CHECK_THROWS_AS(parity_oracle(two, ParityModel{}), BadModeIndex);

    FockState one = fock_basis({4}, {1});
    ParityModel off;
    off.t = 1.0;
    CHECK_THROWS_AS(parity_oracle(one, off), Error);
    ParityModel excited;
    excited.atom = AtomLevel::kExcited;
    CHECK_THROWS_AS(parity_oracle(one, excited), Error);

    // heavily truncated coherent field loses too much weight
    CHECK_THROWS_AS(parity_oracle(coherent_fock(3.0, 10), ParityModel{}),
                    CutoffTooSmall);
    CHECK_THROWS_AS(parity_oracle(fock_zero({4}), ParityModel{}), ZeroState);
}
