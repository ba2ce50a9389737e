#include "ecs/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace ecs {

namespace {

void check_finite(cx v, const char* what) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw Error(std::string(what) + " must be finite");
}

void check_mode(const CoherentSuperposition& s, std::size_t m) {
    if (m >= s.mode_count)
        throw BadModeIndex("mode index " + std::to_string(m) +
                           " out of range for " + std::to_string(s.mode_count) +
                           " modes");
}

// Merge terms whose label vectors agree within 1e-12 per component, then drop
// negligible coefficients. Term order is preserved so downstream reports stay
// byte-deterministic. Never empties the list.
void compact(CoherentSuperposition& s) {
    std::vector<CoherentTerm> out;
    out.reserve(s.terms.size());
    for (auto& t : s.terms) {
        bool merged = false;
        for (auto& o : out) {
            bool close = true;
            for (std::size_t k = 0; k < t.labels.size() && close; ++k) {
                close = std::abs(t.labels[k].real() - o.labels[k].real()) <= 1e-12 &&
                        std::abs(t.labels[k].imag() - o.labels[k].imag()) <= 1e-12;
            }
            if (close) {
                o.coeff += t.coeff;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(std::move(t));
    }
    std::vector<CoherentTerm> kept;
    kept.reserve(out.size());
    for (auto& t : out)
        if (std::abs(t.coeff) >= 1e-15) kept.push_back(std::move(t));
    if (kept.empty()) {
        // fully cancelled state; keep the largest remnant so the value stays
        // structurally valid (norm ~ 0, callers hit NearSingularState later)
        auto it = std::max_element(out.begin(), out.end(),
                                   [](const CoherentTerm& a, const CoherentTerm& b) {
                                       return std::abs(a.coeff) < std::abs(b.coeff);
                                   });
        kept.push_back(*it);
    }
    s.terms = std::move(kept);
}

bool is_unit_norm(const CoherentSuperposition& s) {
    if (s.normalized) return true;
    return std::abs(squared_norm(s) - 1.0) <= 1e-9;
}

} // namespace

CoherentSuperposition make_superposition(std::size_t mode_count,
                                         std::vector<CoherentTerm> terms) {
    if (mode_count == 0) throw Error("mode_count must be positive");
    if (terms.empty()) throw EmptyState("superposition needs at least one term");
    for (const auto& t : terms) {
        if (t.labels.size() != mode_count)
            throw MismatchedModeCount(
                "term has " + std::to_string(t.labels.size()) + " labels, state has " +
                std::to_string(mode_count) + " modes");
        check_finite(t.coeff, "coefficient");
        for (cx l : t.labels) check_finite(l, "coherent label");
    }
    CoherentSuperposition s;
    s.mode_count = mode_count;
    s.terms = std::move(terms);
    s.normalized = false;
    return s;
}

cx coherent_overlap(cx a, cx b) {
    return std::exp(cx(-0.5 * (std::norm(a) + std::norm(b)), 0.0) +
                    std::conj(a) * b);
}

cx overlap(const CoherentSuperposition& s1, const CoherentSuperposition& s2) {
    if (s1.mode_count != s2.mode_count)
        throw MismatchedModeCount("overlap of states with different mode counts");
    cx tot = 0.0;
    for (const auto& t1 : s1.terms) {
        for (const auto& t2 : s2.terms) {
            cx p = std::conj(t1.coeff) * t2.coeff;
            for (std::size_t k = 0; k < s1.mode_count; ++k)
                p *= coherent_overlap(t1.labels[k], t2.labels[k]);
            tot += p;
        }
    }
    return tot;
}

double squared_norm(const CoherentSuperposition& s) {
    return overlap(s, s).real();
}

CoherentSuperposition normalize(const CoherentSuperposition& s) {
    double sn = squared_norm(s);
    if (sn < 1e-14)
        throw NearSingularState("state norm too small to normalize (squared norm " +
                                std::to_string(sn) + ")");
    CoherentSuperposition out = s;
    double f = 1.0 / std::sqrt(sn);
    for (auto& t : out.terms) t.coeff *= f;
    out.normalized = true;
    return out;
}

CoherentSuperposition apply_phase_shift(const CoherentSuperposition& s,
                                        std::size_t mode, double phi) {
    check_mode(s, mode);
    CoherentSuperposition out = s;
    cx f = std::polar(1.0, phi);
    for (auto& t : out.terms) t.labels[mode] *= f;
    compact(out);
    return out;
}

CoherentSuperposition apply_balanced_bs(const CoherentSuperposition& s,
                                        std::size_t i, std::size_t j) {
    check_mode(s, i);
    check_mode(s, j);
    if (i == j) throw SameMode("beam splitter needs two distinct modes");
    CoherentSuperposition out = s;
    for (auto& t : out.terms) {
        cx a = t.labels[i], b = t.labels[j];
        t.labels[i] = (a + b) * kInvSqrt2;
        t.labels[j] = (a - b) * kInvSqrt2;
    }
    compact(out);
    return out;
}

CoherentSuperposition apply_raw_bs(const CoherentSuperposition& s,
                                   std::size_t i, std::size_t j) {
    check_mode(s, i);
    check_mode(s, j);
    if (i == j) throw SameMode("beam splitter needs two distinct modes");
    const cx im(0.0, 1.0);
    CoherentSuperposition out = s;
    for (auto& t : out.terms) {
        cx a = t.labels[i], b = t.labels[j];
        t.labels[i] = (a + im * b) * kInvSqrt2;
        t.labels[j] = (b + im * a) * kInvSqrt2;
    }
    compact(out);
    return out;
}

CoherentSuperposition tensor(const CoherentSuperposition& a,
                             const CoherentSuperposition& b) {
    if (a.terms.empty() || b.terms.empty())
        throw EmptyState("tensor of an empty superposition");
    CoherentSuperposition out;
    out.mode_count = a.mode_count + b.mode_count;
    out.terms.reserve(a.terms.size() * b.terms.size());
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms) {
            CoherentTerm t;
            t.coeff = ta.coeff * tb.coeff;
            t.labels = ta.labels;
            t.labels.insert(t.labels.end(), tb.labels.begin(), tb.labels.end());
            out.terms.push_back(std::move(t));
        }
    out.normalized = a.normalized && b.normalized;
    compact(out);
    return out;
}

cx fock_amplitude(cx a, int n) {
    if (n < 0) throw Error("photon number must be nonnegative");
    double a2 = std::norm(a);
    if (a2 == 0.0) return n == 0 ? cx(1.0, 0.0) : cx(0.0, 0.0);
    if (n <= 20) {
        cx amp = std::exp(cx(-0.5 * a2, 0.0));
        for (int k = 1; k <= n; ++k) amp *= a / std::sqrt(double(k));
        return amp;
    }
    // log space: |amp| = exp(-a2/2 + n ln|a| - lgamma(n+1)/2), phase n*arg(a)
    double lr = -0.5 * a2 + n * 0.5 * std::log(a2) - 0.5 * std::lgamma(double(n) + 1.0);
    return std::polar(std::exp(lr), double(n) * std::arg(a));
}

ModeProjection project_two_mode_number(const CoherentSuperposition& s,
                                       std::size_t i, std::size_t j,
                                       int n, int m) {
    check_mode(s, i);
    check_mode(s, j);
    if (i == j) throw SameMode("projection needs two distinct modes");
    if (n < 0 || m < 0) throw Error("photon counts must be nonnegative");
    if (!is_unit_norm(s))
        throw NotNormalized("two-mode number projection expects a normalized state");

    CoherentSuperposition res;
    res.mode_count = s.mode_count - 2;
    res.terms.reserve(s.terms.size());
    for (const auto& t : s.terms) {
        CoherentTerm r;
        r.coeff = t.coeff * fock_amplitude(t.labels[i], n) *
                  fock_amplitude(t.labels[j], m);
        r.labels.reserve(res.mode_count);
        for (std::size_t k = 0; k < s.mode_count; ++k)
            if (k != i && k != j) r.labels.push_back(t.labels[k]);
        res.terms.push_back(std::move(r));
    }
    return {squared_norm(res), std::move(res)};
}

int default_enumeration_cap() {
    if (const char* env = std::getenv("CAT_TELEPORT_MAX_PHOTONS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 512;
}

std::vector<MeasurementOutcome>
measurement_distribution(const CoherentSuperposition& s, std::size_t i,
                         std::size_t j, double mass_tolerance, int max_total) {
    if (!(mass_tolerance > 0.0 && mass_tolerance < 1.0))
        throw Error("mass_tolerance must lie in (0, 1)");
    int cap = max_total < 0 ? default_enumeration_cap() : max_total;

    std::vector<MeasurementOutcome> out;
    double cum = 0.0;
    for (int total = 0; total <= cap; ++total) {
        for (int n = 0; n <= total; ++n) {
            auto pr = project_two_mode_number(s, i, j, n, total - n);
            cum += pr.probability;
            if (pr.probability > 1e-20)
                out.push_back({n, total - n, pr.probability, std::move(pr.residual)});
        }
        if (cum >= 1.0 - mass_tolerance) return out;
    }
    throw NonConvergence("measurement enumeration reached n+m = " +
                         std::to_string(cap) + " with mass " + std::to_string(cum));
}

} // namespace ecs
