#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ecs/errors.hpp"

namespace ecs {

using cx = std::complex<double>;

// 1/sqrt(2), correctly rounded. All beam-splitter label arithmetic uses this
// constant through the exact expression (a+b)*kInvSqrt2 so that protocol
// states built from the same expression cancel bitwise (see chain_layout).
inline constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

struct CoherentTerm {
    cx coeff;
    std::vector<cx> labels; // one coherent label per mode
};

// Finite superposition of multimode coherent kets. Exact: no photon-number
// truncation anywhere; inner products go through the Gram matrix of labels.
struct CoherentSuperposition {
    std::size_t mode_count = 0;
    std::vector<CoherentTerm> terms;
    bool normalized = false;
};

CoherentSuperposition make_superposition(std::size_t mode_count,
                                         std::vector<CoherentTerm> terms);

// <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a)*b)
cx coherent_overlap(cx a, cx b);

cx overlap(const CoherentSuperposition& s1, const CoherentSuperposition& s2);
double squared_norm(const CoherentSuperposition& s);

// Throws NearSingularState below squared norm 1e-14.
CoherentSuperposition normalize(const CoherentSuperposition& s);

// Label at `mode` multiplied by e^{i*phi} in every term.
CoherentSuperposition apply_phase_shift(const CoherentSuperposition& s,
                                        std::size_t mode, double phi);

// (a_i, a_j) -> ((a_i+a_j)/sqrt2, (a_i-a_j)/sqrt2); involutive.
CoherentSuperposition apply_balanced_bs(const CoherentSuperposition& s,
                                        std::size_t i, std::size_t j);

// (a_i, a_j) -> ((a_i+i*a_j)/sqrt2, (a_j+i*a_i)/sqrt2). Conjugating mode j
// with -pi/2 phase shifts on both sides reproduces apply_balanced_bs.
CoherentSuperposition apply_raw_bs(const CoherentSuperposition& s,
                                   std::size_t i, std::size_t j);

// <n|a> = e^{-|a|^2/2} a^n / sqrt(n!), evaluated in log space for large n.
cx fock_amplitude(cx a, int n);

// Kronecker product: modes of `a` first, then modes of `b`.
CoherentSuperposition tensor(const CoherentSuperposition& a,
                             const CoherentSuperposition& b);

struct ModeProjection {
    double probability;            // |<n|_i <m|_j s>|^2 for normalized s
    CoherentSuperposition residual; // unnormalized, modes i and j removed
};

ModeProjection project_two_mode_number(const CoherentSuperposition& s,
                                       std::size_t i, std::size_t j,
                                       int n, int m);

struct MeasurementOutcome {
    int n = 0;
    int m = 0;
    double probability = 0.0;
    CoherentSuperposition residual; // unnormalized collapsed state
};

// Hard cap on n+m during outcome enumeration; reads CAT_TELEPORT_MAX_PHOTONS,
// defaults to 512.
int default_enumeration_cap();

// Diagonal sweep by total photon number (ties by ascending n) until the
// cumulative probability reaches 1 - mass_tolerance. Outcomes with
// probability <= 1e-20 are accumulated but not listed. max_total < 0 means
// default_enumeration_cap().
std::vector<MeasurementOutcome>
measurement_distribution(const CoherentSuperposition& s, std::size_t i,
                         std::size_t j, double mass_tolerance,
                         int max_total = -1);

} // namespace ecs
