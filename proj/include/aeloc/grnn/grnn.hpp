#pragma once

// Conditional-average estimator (general regression neural network).
//
// Each prototype is split into an observed part `given` (g_n) and a hidden
// part (h_n). A query g is completed as
//
//   h(g) = sum_n B_n(g) h_n,   B_n(g) = w_n(g) / sum_k w_k(g),
//   w_n(g) = exp(-|g - g_n|^2 / (2 sigma_n^2)),
//
// with sigma_n by default half the distance from g_n to its nearest distinct
// neighbour.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aeloc/error.hpp"

namespace aeloc::grnn {

struct PrototypeVector {
    std::vector<double> given;
    std::vector<double> hidden;

    friend bool operator==(const PrototypeVector&, const PrototypeVector&) = default;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InvalidArgument("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

/// Gaussian kernel exp(-|g - g_n|^2 / (2 sigma^2)). Far queries underflow to 0 quietly.
inline double kernel(std::span<const double> g, std::span<const double> g_n, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidArgument("kernel: smoothing width must be positive, got " + std::to_string(sigma));
    return std::exp(-squared_distance(g, g_n) / (2.0 * sigma * sigma));
}

/// sigma_n = 0.5 * min_{i != n, g_i != g_n} |g_i - g_n|.
inline std::vector<double> compute_sigmas(std::span<const PrototypeVector> prototypes) {
    if (prototypes.size() < 2)
        throw InvalidArgument("compute_sigmas: sigma undefined for a single prototype; supply it explicitly");
    std::vector<double> sigmas(prototypes.size());
    for (std::size_t n = 0; n < prototypes.size(); ++n) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < prototypes.size(); ++i) {
            if (i == n) continue;
            const double d = std::sqrt(squared_distance(prototypes[i].given, prototypes[n].given));
            if (d > 0.0 && d < nearest) nearest = d;
        }
        if (!std::isfinite(nearest))
            throw InvalidArgument("compute_sigmas: prototype " + std::to_string(n) +
                                  " has no distinct neighbour (all others duplicate its observed part)");
        sigmas[n] = 0.5 * nearest;
    }
    return sigmas;
}

/// Immutable prototype database with per-prototype smoothing widths.
class PrototypeSet {
public:
    PrototypeSet(std::vector<PrototypeVector> prototypes, std::vector<double> sigmas)
        : prototypes_(std::move(prototypes)), sigmas_(std::move(sigmas)) {
        if (prototypes_.empty()) throw InvalidArgument("PrototypeSet: needs at least one prototype");
        if (sigmas_.size() != prototypes_.size())
            throw InvalidArgument("PrototypeSet: " + std::to_string(sigmas_.size()) + " sigmas for " +
                                  std::to_string(prototypes_.size()) + " prototypes");
        given_dim_ = prototypes_.front().given.size();
        hidden_dim_ = prototypes_.front().hidden.size();
        if (given_dim_ == 0) throw InvalidArgument("PrototypeSet: observed part is empty");
        for (std::size_t n = 0; n < prototypes_.size(); ++n) {
            const auto& p = prototypes_[n];
            if (p.given.size() != given_dim_ || p.hidden.size() != hidden_dim_)
                throw InvalidArgument("PrototypeSet: prototype " + std::to_string(n) + " has inconsistent dimensions");
            for (double v : p.given)
                if (!std::isfinite(v)) throw InvalidArgument("PrototypeSet: non-finite component in prototype " + std::to_string(n));
            for (double v : p.hidden)
                if (!std::isfinite(v)) throw InvalidArgument("PrototypeSet: non-finite component in prototype " + std::to_string(n));
            if (!(sigmas_[n] > 0.0) || !std::isfinite(sigmas_[n]))
                throw InvalidArgument("PrototypeSet: sigma of prototype " + std::to_string(n) + " must be positive");
        }
    }

    /// Widths from the nearest-neighbour rule.
    static PrototypeSet with_nearest_neighbour_sigmas(std::vector<PrototypeVector> prototypes) {
        auto sigmas = compute_sigmas(prototypes);
        return PrototypeSet(std::move(prototypes), std::move(sigmas));
    }

    /// One width shared by every prototype.
    static PrototypeSet with_global_sigma(std::vector<PrototypeVector> prototypes, double sigma) {
        std::vector<double> sigmas(prototypes.size(), sigma);
        return PrototypeSet(std::move(prototypes), std::move(sigmas));
    }

    /// Copy with every sigma multiplied by `factor`.
    PrototypeSet scaled_sigmas(double factor) const {
        auto s = sigmas_;
        for (double& v : s) v *= factor;
        return PrototypeSet(prototypes_, std::move(s));
    }

    std::span<const PrototypeVector> prototypes() const noexcept { return prototypes_; }
    std::span<const double> sigmas() const noexcept { return sigmas_; }
    const PrototypeVector& operator[](std::size_t n) const noexcept { return prototypes_[n]; }
    std::size_t size() const noexcept { return prototypes_.size(); }
    std::size_t given_dim() const noexcept { return given_dim_; }
    std::size_t hidden_dim() const noexcept { return hidden_dim_; }

    /// Index of the Euclidean-nearest prototype in given-space; ties go to the lowest index.
    std::size_t nearest(std::span<const double> g) const {
        std::size_t best = 0;
        double best_d = squared_distance(g, prototypes_[0].given);
        for (std::size_t n = 1; n < prototypes_.size(); ++n) {
            const double d = squared_distance(g, prototypes_[n].given);
            if (d < best_d) {
                best_d = d;
                best = n;
            }
        }
        return best;
    }

    friend bool operator==(const PrototypeSet&, const PrototypeSet&) = default;

private:
    std::vector<PrototypeVector> prototypes_;
    std::vector<double> sigmas_;
    std::size_t given_dim_ = 0;
    std::size_t hidden_dim_ = 0;
};

struct BasisWeights {
    std::vector<double> values;
    /// Every kernel underflowed; `values` is one-hot on the nearest prototype.
    bool extrapolated = false;
};

inline BasisWeights basis_weights(const PrototypeSet& set, std::span<const double> g) {
    if (g.size() != set.given_dim())
        throw InvalidArgument("basis_weights: query has " + std::to_string(g.size()) + " components, expected " +
                              std::to_string(set.given_dim()));
    BasisWeights w;
    w.values.resize(set.size());
    double total = 0.0;
    for (std::size_t n = 0; n < set.size(); ++n) {
        w.values[n] = kernel(g, set[n].given, set.sigmas()[n]);
        total += w.values[n];
    }
    if (total > 0.0) {
        for (double& v : w.values) v /= total;
    } else {
        std::fill(w.values.begin(), w.values.end(), 0.0);
        w.values[set.nearest(g)] = 1.0;
        w.extrapolated = true;
    }
    return w;
}

struct Estimate {
    std::vector<double> hidden;
    std::vector<double> weights;
    std::size_t effective_support = 0; ///< weights above 1e-6
    bool extrapolated = false;

    double top_weight() const { return weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end()); }
};

inline Estimate estimate(const PrototypeSet& set, std::span<const double> g) {
    auto w = basis_weights(set, g);
    Estimate est;
    est.hidden.assign(set.hidden_dim(), 0.0);
    for (std::size_t n = 0; n < set.size(); ++n) {
        const double b = w.values[n];
        if (b > 1e-6) ++est.effective_support;
        for (std::size_t j = 0; j < set.hidden_dim(); ++j) est.hidden[j] += b * set[n].hidden[j];
    }
    // Rounding can push a convex combination a hair outside the hull.
    for (std::size_t j = 0; j < set.hidden_dim(); ++j) {
        double lo = set[0].hidden[j], hi = lo;
        for (const auto& p : set.prototypes()) {
            lo = std::min(lo, p.hidden[j]);
            hi = std::max(hi, p.hidden[j]);
        }
        est.hidden[j] = std::clamp(est.hidden[j], lo, hi);
    }
    est.weights = std::move(w.values);
    est.extrapolated = w.extrapolated;
    return est;
}

} // namespace aeloc::grnn
