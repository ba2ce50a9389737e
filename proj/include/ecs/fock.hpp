#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "ecs/coherent.hpp"
#include "ecs/errors.hpp"

namespace ecs {

// Dense truncated photon-number tensor. Row-major with mode 0 slowest:
// flat = ((n0*K1 + n1)*K2 + n2)...
struct FockState {
    std::vector<int> cutoffs;
    std::vector<cx> amp;
    bool normalized = false;

    std::size_t mode_count() const { return cutoffs.size(); }
    std::size_t size() const { return amp.size(); }
};

enum class BsVariant { kRaw, kBalanced };

FockState fock_zero(std::vector<int> cutoffs);
FockState fock_basis(std::vector<int> cutoffs, const std::vector<int>& ns);
FockState coherent_fock(cx a, int cutoff);

double fock_norm2(const FockState& s);
cx fock_inner(const FockState& s1, const FockState& s2);
FockState normalize(const FockState& s);
double truncation_deficit(const FockState& s); // 1 - squared norm

FockState tensor(const FockState& a, const FockState& b);

// Exact rotation inside each total-photon block of the (i,j) pair; unitary at
// any cutoff, conserves n_i + n_j. Requires equal cutoffs on i and j.
FockState apply_two_mode_bs(const FockState& s, std::size_t i, std::size_t j,
                            BsVariant variant);

FockState apply_phase_fock(const FockState& s, std::size_t i, double phi);

// Grow the cutoff of one mode, zero-padding the new levels.
FockState pad_mode(const FockState& s, std::size_t mode, int new_cutoff);

struct FockProjection {
    double weight;   // squared norm of the slice
    FockState rest;  // unnormalized state on the remaining modes
};
FockProjection project_mode_number(const FockState& s, std::size_t mode, int n);

struct DensityMatrix {
    std::vector<int> dims; // per-kept-mode dimensions
    Eigen::MatrixXcd rho;  // unit trace
};

DensityMatrix partial_trace(const FockState& s, const std::vector<std::size_t>& keep);
double purity(const DensityMatrix& dm);
double hermiticity_defect(const DensityMatrix& dm);
double min_eigenvalue(const DensityMatrix& dm);

// |<s1|s2>|^2 normalized by both norms.
double fidelity(const FockState& s1, const FockState& s2);

struct ToFockResult {
    FockState state;
    double truncation_error; // 1 - retained fraction of the squared norm
};
ToFockResult to_fock(const CoherentSuperposition& s, const std::vector<int>& cutoffs,
                     double min_retained = 0.999);
ToFockResult to_fock(const CoherentSuperposition& s, int cutoff,
                     double min_retained = 0.999);

// ceil(mu + 6 sqrt(mu) + 10) for mu = largest reachable |label|^2 on a mode.
int cutoff_for(double mu);

} // namespace ecs
