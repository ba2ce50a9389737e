#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ecs/coherent.hpp"
#include "ecs/fock.hpp"

namespace ecs {

enum class ChannelSign { kMinus, kPlus };

struct Bipartition {
    std::vector<std::size_t> side_a;
    std::vector<std::size_t> side_b;

    // side_a explicit, side_b the complement in [0, total)
    static Bipartition of(std::vector<std::size_t> a, std::size_t total);
};

// sqrt(2 (1 - Tr rho_A^2)) for a normalized pure state.
double concurrence_pure(const CoherentSuperposition& s, const Bipartition& p);
double concurrence_pure(const FockState& s, const Bipartition& p);

// Bipartitions of the three-mode channel: the singled-out mode vs the rest.
enum class TriCut { kMode0, kMode1, kMode2 };

double concurrence_closed_form(ChannelSign sign, TriCut cut, double alpha);

// Minus channel: exactly 1/2. Plus channel: (1-e^{-4a^2})^2 / (2(1+e^{-8a^2})).
double success_prob_closed_form(ChannelSign sign, double alpha);

// Same quantity for an N-party input teleported through an (N+1)-mode chain
// channel; input_parties = 2 reduces to success_prob_closed_form.
double success_prob_reference(ChannelSign sign, double alpha, int input_parties);

struct ClosedFormCurve {
    std::string name;
    std::vector<double> alpha;
    std::vector<double> values;
};

} // namespace ecs
