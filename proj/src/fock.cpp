#include "ecs/fock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

namespace ecs {

namespace {

constexpr std::size_t kMaxTensorElements = 20'000'000;

std::size_t checked_total(const std::vector<int>& cutoffs) {
    if (cutoffs.empty()) throw Error("fock state needs at least one mode");
    std::size_t total = 1;
    for (int k : cutoffs) {
        if (k < 1) throw Error("per-mode cutoff must be at least 1");
        total *= std::size_t(k);
        if (total > kMaxTensorElements)
            throw Error("fock tensor exceeds the " +
                        std::to_string(kMaxTensorElements) +
                        "-element resource limit");
    }
    return total;
}

std::vector<std::size_t> strides_of(const std::vector<int>& cutoffs) {
    std::vector<std::size_t> st(cutoffs.size());
    std::size_t acc = 1;
    for (std::size_t k = cutoffs.size(); k-- > 0;) {
        st[k] = acc;
        acc *= std::size_t(cutoffs[k]);
    }
    return st;
}

void check_mode(const FockState& s, std::size_t m) {
    if (m >= s.mode_count())
        throw BadModeIndex("mode index " + std::to_string(m) +
                           " out of range for " + std::to_string(s.mode_count()) +
                           " modes");
}

// Unitary of one total-photon block of the two-mode beam splitter at equal
// cutoff K: basis |k, N-k> for k in [max(0,N-K+1), min(N,K-1)].
const Eigen::MatrixXcd& bs_block(int N, int K, BsVariant variant) {
    thread_local std::map<std::tuple<int, int, int>, Eigen::MatrixXcd> cache;
    auto key = std::make_tuple(N, K, variant == BsVariant::kBalanced ? 1 : 0);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    int kmin = std::max(0, N - K + 1), kmax = std::min(N, K - 1);
    int d = kmax - kmin + 1;
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(d, d);
    for (int r = 0; r + 1 < d; ++r) {
        int k = kmin + r;
        double g = std::sqrt(double(k + 1) * double(N - k));
        gen(r, r + 1) = g;
        gen(r + 1, r) = g;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gen);
    Eigen::VectorXcd phases(d);
    for (int r = 0; r < d; ++r)
        phases(r) = std::polar(1.0, 0.25 * M_PI * es.eigenvalues()(r));
    Eigen::MatrixXcd U = es.eigenvectors().cast<cx>() * phases.asDiagonal() *
                         es.eigenvectors().transpose().cast<cx>();
    if (variant == BsVariant::kBalanced) {
        // conjugate with e^{-i pi/2 n_j} on the second mode (n_j = N-k)
        Eigen::VectorXcd dphase(d);
        for (int r = 0; r < d; ++r)
            dphase(r) = std::polar(1.0, -0.5 * M_PI * double(N - (kmin + r)));
        U = dphase.asDiagonal() * U * dphase.asDiagonal();
    }
    return cache.emplace(key, std::move(U)).first->second;
}

} // namespace

FockState fock_zero(std::vector<int> cutoffs) {
    std::size_t total = checked_total(cutoffs);
    FockState s;
    s.cutoffs = std::move(cutoffs);
    s.amp.assign(total, cx(0.0, 0.0));
    return s;
}

FockState fock_basis(std::vector<int> cutoffs, const std::vector<int>& ns) {
    FockState s = fock_zero(std::move(cutoffs));
    if (ns.size() != s.mode_count())
        throw MismatchedModeCount("basis occupation list does not match mode count");
    auto st = strides_of(s.cutoffs);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        if (ns[k] < 0 || ns[k] >= s.cutoffs[k])
            throw CutoffTooSmall("basis occupation exceeds the cutoff");
        idx += std::size_t(ns[k]) * st[k];
    }
    s.amp[idx] = cx(1.0, 0.0);
    s.normalized = true;
    return s;
}

FockState coherent_fock(cx a, int cutoff) {
    if (cutoff < 1) throw Error("cutoff must be at least 1");
    FockState s = fock_zero({cutoff});
    for (int n = 0; n < cutoff; ++n) s.amp[n] = fock_amplitude(a, n);
    return s;
}

double fock_norm2(const FockState& s) {
    double tot = 0.0;
    for (cx v : s.amp) tot += std::norm(v);
    return tot;
}

cx fock_inner(const FockState& s1, const FockState& s2) {
    if (s1.cutoffs != s2.cutoffs)
        throw CutoffMismatch("inner product needs identical cutoffs");
    cx tot = 0.0;
    for (std::size_t k = 0; k < s1.amp.size(); ++k)
        tot += std::conj(s1.amp[k]) * s2.amp[k];
    return tot;
}

FockState normalize(const FockState& s) {
    double n2 = fock_norm2(s);
    if (n2 < 1e-14)
        throw NearSingularState("fock state norm too small to normalize");
    FockState out = s;
    double f = 1.0 / std::sqrt(n2);
    for (cx& v : out.amp) v *= f;
    out.normalized = true;
    return out;
}

double truncation_deficit(const FockState& s) { return 1.0 - fock_norm2(s); }

FockState tensor(const FockState& a, const FockState& b) {
    std::vector<int> cut = a.cutoffs;
    cut.insert(cut.end(), b.cutoffs.begin(), b.cutoffs.end());
    FockState out = fock_zero(std::move(cut));
    std::size_t nb = b.amp.size();
    for (std::size_t ia = 0; ia < a.amp.size(); ++ia)
        for (std::size_t ib = 0; ib < nb; ++ib)
            out.amp[ia * nb + ib] = a.amp[ia] * b.amp[ib];
    out.normalized = a.normalized && b.normalized;
    return out;
}

FockState apply_two_mode_bs(const FockState& s, std::size_t i, std::size_t j,
                            BsVariant variant) {
    check_mode(s, i);
    check_mode(s, j);
    if (i == j) throw SameMode("beam splitter needs two distinct modes");
    if (s.cutoffs[i] != s.cutoffs[j])
        throw CutoffMismatch("beam splitter needs equal cutoffs on its two modes");

    int K = s.cutoffs[i];
    auto st = strides_of(s.cutoffs);
    std::size_t si = st[i], sj = st[j];
    FockState out = s;
    std::vector<cx> v, w;
    for (std::size_t base = 0; base < s.amp.size(); ++base) {
        if ((base / si) % std::size_t(K) != 0) continue;
        if ((base / sj) % std::size_t(K) != 0) continue;
        for (int N = 0; N <= 2 * (K - 1); ++N) {
            const Eigen::MatrixXcd& U = bs_block(N, K, variant);
            int kmin = std::max(0, N - K + 1);
            int d = int(U.rows());
            v.assign(d, cx(0, 0));
            for (int r = 0; r < d; ++r)
                v[r] = s.amp[base + std::size_t(kmin + r) * si +
                             std::size_t(N - kmin - r) * sj];
            w.assign(d, cx(0, 0));
            for (int r = 0; r < d; ++r) {
                cx acc = 0.0;
                for (int c = 0; c < d; ++c) acc += U(r, c) * v[c];
                w[r] = acc;
            }
            for (int r = 0; r < d; ++r)
                out.amp[base + std::size_t(kmin + r) * si +
                        std::size_t(N - kmin - r) * sj] = w[r];
        }
    }
    return out;
}

FockState apply_phase_fock(const FockState& s, std::size_t i, double phi) {
    check_mode(s, i);
    int K = s.cutoffs[i];
    std::vector<cx> table(K);
    for (int n = 0; n < K; ++n) table[n] = std::polar(1.0, phi * double(n));
    auto st = strides_of(s.cutoffs);
    FockState out = s;
    for (std::size_t idx = 0; idx < s.amp.size(); ++idx)
        out.amp[idx] *= table[(idx / st[i]) % std::size_t(K)];
    return out;
}

FockState pad_mode(const FockState& s, std::size_t mode, int new_cutoff) {
    check_mode(s, mode);
    if (new_cutoff < s.cutoffs[mode])
        throw CutoffTooSmall("pad_mode cannot shrink a mode");
    if (new_cutoff == s.cutoffs[mode]) return s;
    std::vector<int> cut = s.cutoffs;
    cut[mode] = new_cutoff;
    FockState out = fock_zero(std::move(cut));
    out.normalized = s.normalized;
    auto sold = strides_of(s.cutoffs), snew = strides_of(out.cutoffs);
    for (std::size_t idx = 0; idx < s.amp.size(); ++idx) {
        std::size_t rem = idx, nidx = 0;
        for (std::size_t k = 0; k < s.cutoffs.size(); ++k) {
            std::size_t digit = rem / sold[k];
            rem %= sold[k];
            nidx += digit * snew[k];
        }
        out.amp[nidx] = s.amp[idx];
    }
    return out;
}

FockProjection project_mode_number(const FockState& s, std::size_t mode, int n) {
    check_mode(s, mode);
    if (n < 0 || n >= s.cutoffs[mode])
        throw CutoffTooSmall("projection level outside the mode cutoff");
    if (s.mode_count() == 1) {
        // scalar remainder kept as a one-element pseudo-state
        FockState rest = fock_zero({1});
        rest.amp[0] = s.amp[std::size_t(n)];
        return {std::norm(s.amp[std::size_t(n)]), std::move(rest)};
    }
    std::vector<int> cut;
    for (std::size_t k = 0; k < s.cutoffs.size(); ++k)
        if (k != mode) cut.push_back(s.cutoffs[k]);
    FockState rest = fock_zero(std::move(cut));
    auto st = strides_of(s.cutoffs);
    auto str = strides_of(rest.cutoffs);
    for (std::size_t idx = 0; idx < s.amp.size(); ++idx) {
        if ((idx / st[mode]) % std::size_t(s.cutoffs[mode]) != std::size_t(n))
            continue;
        std::size_t rem = idx, ridx = 0, rk = 0;
        for (std::size_t k = 0; k < s.cutoffs.size(); ++k) {
            std::size_t digit = rem / st[k];
            rem %= st[k];
            if (k != mode) ridx += digit * str[rk++];
        }
        rest.amp[ridx] = s.amp[idx];
    }
    return {fock_norm2(rest), std::move(rest)};
}

DensityMatrix partial_trace(const FockState& s, const std::vector<std::size_t>& keep) {
    if (keep.empty()) throw BadModeIndex("partial trace needs a nonempty subset");
    std::vector<bool> kept(s.mode_count(), false);
    for (std::size_t m : keep) {
        check_mode(s, m);
        if (kept[m]) throw BadModeIndex("duplicate mode in partial trace subset");
        kept[m] = true;
    }
    if (keep.size() >= s.mode_count())
        throw BadModeIndex("partial trace subset must be proper");

    std::vector<std::size_t> keep_sorted(keep);
    std::sort(keep_sorted.begin(), keep_sorted.end());
    std::size_t D = 1, E = 1;
    std::vector<int> dims;
    for (std::size_t k = 0; k < s.mode_count(); ++k) {
        if (kept[k]) {
            D *= std::size_t(s.cutoffs[k]);
            dims.push_back(s.cutoffs[k]);
        } else {
            E *= std::size_t(s.cutoffs[k]);
        }
    }
    Eigen::MatrixXcd M(D, E);
    auto st = strides_of(s.cutoffs);
    for (std::size_t idx = 0; idx < s.amp.size(); ++idx) {
        std::size_t rem = idx, a = 0, e = 0;
        for (std::size_t k = 0; k < s.mode_count(); ++k) {
            std::size_t digit = rem / st[k];
            rem %= st[k];
            if (kept[k])
                a = a * std::size_t(s.cutoffs[k]) + digit;
            else
                e = e * std::size_t(s.cutoffs[k]) + digit;
        }
        M(a, e) = s.amp[idx];
    }
    Eigen::MatrixXcd rho = M * M.adjoint();
    double tr = rho.trace().real();
    if (tr < 1e-30) throw ZeroState("partial trace of a zero state");
    rho /= tr;
    return {std::move(dims), std::move(rho)};
}

double purity(const DensityMatrix& dm) { return dm.rho.squaredNorm(); }

double hermiticity_defect(const DensityMatrix& dm) {
    return (dm.rho - dm.rho.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const DensityMatrix& dm) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dm.rho);
    return es.eigenvalues().minCoeff();
}

double fidelity(const FockState& s1, const FockState& s2) {
    double n1 = fock_norm2(s1), n2 = fock_norm2(s2);
    if (n1 < 1e-30 || n2 < 1e-30) throw ZeroState("fidelity of a zero state");
    return std::norm(fock_inner(s1, s2)) / (n1 * n2);
}

ToFockResult to_fock(const CoherentSuperposition& s, const std::vector<int>& cutoffs,
                     double min_retained) {
    if (cutoffs.size() != s.mode_count)
        throw MismatchedModeCount("cutoff list does not match the state's modes");
    FockState out = fock_zero(cutoffs);
    for (const auto& t : s.terms) {
        std::vector<cx> acc{t.coeff};
        for (std::size_t k = 0; k < s.mode_count; ++k) {
            std::vector<cx> next(acc.size() * std::size_t(cutoffs[k]));
            for (std::size_t p = 0; p < acc.size(); ++p)
                for (int n = 0; n < cutoffs[k]; ++n)
                    next[p * std::size_t(cutoffs[k]) + std::size_t(n)] =
                        acc[p] * fock_amplitude(t.labels[k], n);
            acc = std::move(next);
        }
        for (std::size_t idx = 0; idx < out.amp.size(); ++idx) out.amp[idx] += acc[idx];
    }
    double retained = fock_norm2(out) / squared_norm(s);
    if (retained < min_retained)
        throw CutoffTooSmall("cutoffs retain only " + std::to_string(retained) +
                             " of the squared norm");
    return {std::move(out), 1.0 - retained};
}

ToFockResult to_fock(const CoherentSuperposition& s, int cutoff, double min_retained) {
    return to_fock(s, std::vector<int>(s.mode_count, cutoff), min_retained);
}

int cutoff_for(double mu) {
    if (mu < 0) throw Error("mean photon number must be nonnegative");
    return int(std::ceil(mu + 6.0 * std::sqrt(mu) + 10.0));
}

} // namespace ecs
