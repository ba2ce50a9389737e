#include "ecs/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace ecs {

namespace {

double reduced_purity_gram(const CoherentSuperposition& s,
                           const std::vector<bool>& in_a) {
    // rho_A = sum_jk c_j c_k* <B_k|B_j> |A_j><A_k| over the nonorthogonal
    // per-term label vectors; Tr rho_A^2 contracts four copies of the Gram
    // matrix. Exact for any term count, no truncation.
    const auto& T = s.terms;
    std::size_t n = T.size();
    auto part_ov = [&](const CoherentTerm& x, const CoherentTerm& y, bool side_a) {
        cx p(1.0, 0.0);
        for (std::size_t k = 0; k < s.mode_count; ++k)
            if (in_a[k] == side_a) p *= coherent_overlap(x.labels[k], y.labels[k]);
        return p;
    };
    cx tot(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t l = 0; l < n; ++l)
                for (std::size_t m = 0; m < n; ++m)
                    tot += T[j].coeff * std::conj(T[k].coeff) * T[l].coeff *
                           std::conj(T[m].coeff) * part_ov(T[k], T[j], false) *
                           part_ov(T[m], T[l], false) * part_ov(T[k], T[l], true) *
                           part_ov(T[m], T[j], true);
    return tot.real();
}

void check_unit(double n2) {
    if (std::abs(n2 - 1.0) > 1e-8)
        throw NotNormalized("concurrence_pure expects a normalized state");
}

} // namespace

Bipartition Bipartition::of(std::vector<std::size_t> a, std::size_t total) {
    if (a.empty()) throw BadModeIndex("bipartition side must be nonempty");
    std::sort(a.begin(), a.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end())
        throw BadModeIndex("duplicate mode in bipartition");
    if (a.back() >= total) throw BadModeIndex("bipartition mode out of range");
    if (a.size() >= total) throw BadModeIndex("bipartition side must be proper");
    Bipartition p;
    p.side_a = std::move(a);
    for (std::size_t k = 0; k < total; ++k)
        if (!std::binary_search(p.side_a.begin(), p.side_a.end(), k))
            p.side_b.push_back(k);
    return p;
}

double concurrence_pure(const CoherentSuperposition& s, const Bipartition& p) {
    if (p.side_a.size() + p.side_b.size() != s.mode_count)
        throw MismatchedModeCount("bipartition does not cover the state's modes");
    check_unit(squared_norm(s));
    std::vector<bool> in_a(s.mode_count, false);
    for (std::size_t m : p.side_a) {
        if (m >= s.mode_count) throw BadModeIndex("bipartition mode out of range");
        in_a[m] = true;
    }
    double purity = reduced_purity_gram(s, in_a);
    return std::sqrt(std::max(0.0, 2.0 * (1.0 - purity)));
}

double concurrence_pure(const FockState& s, const Bipartition& p) {
    if (p.side_a.size() + p.side_b.size() != s.mode_count())
        throw MismatchedModeCount("bipartition does not cover the state's modes");
    check_unit(fock_norm2(s));
    // trace out the larger side
    const auto& keep =
        p.side_a.size() <= p.side_b.size() ? p.side_a : p.side_b;
    double pur = purity(partial_trace(s, keep));
    return std::sqrt(std::max(0.0, 2.0 * (1.0 - pur)));
}

double concurrence_closed_form(ChannelSign sign, TriCut cut, double alpha) {
    if (alpha < 0) throw Error("alpha must be nonnegative");
    double a2 = alpha * alpha;
    if (cut == TriCut::kMode0)
        return sign == ChannelSign::kMinus ? 1.0 : std::tanh(4.0 * a2);
    double num = std::sqrt((1.0 - std::exp(-4.0 * a2)) * (1.0 - std::exp(-12.0 * a2)));
    double den = sign == ChannelSign::kMinus ? 1.0 - std::exp(-8.0 * a2)
                                             : 1.0 + std::exp(-8.0 * a2);
    if (den == 0.0) return 0.0; // minus channel at alpha = 0: 0/0 -> vacuum limit
    return num / den;
}

double success_prob_closed_form(ChannelSign sign, double alpha) {
    return success_prob_reference(sign, alpha, 2);
}

double success_prob_reference(ChannelSign sign, double alpha, int input_parties) {
    if (alpha < 0) throw Error("alpha must be nonnegative");
    if (input_parties < 2) throw Error("teleportation needs at least two parties");
    if (sign == ChannelSign::kMinus) return 0.5;
    // measured-pair label is 2^{N/2} alpha for an N-party input
    double b2 = std::pow(2.0, input_parties) * alpha * alpha;
    double one = 1.0 - std::exp(-b2);
    return one * one / (2.0 * (1.0 + std::exp(-2.0 * b2)));
}

} // namespace ecs
