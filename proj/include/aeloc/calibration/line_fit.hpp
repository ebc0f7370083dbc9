#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "aeloc/error.hpp"

namespace aeloc::calibration {

/// A prototype source position (mm) and its measured delay (s).
struct LinePoint {
    double z = 0;
    double delay = 0;
};

struct LineFit {
    double slope = 0;          ///< s/mm
    double intercept = 0;      ///< s
    double rmse_position = 0;  ///< rms residual divided by |slope|, mm
    std::vector<double> residuals; ///< delay - fitted delay, s
};

/// Ordinary least squares delay = slope * z + intercept.
inline LineFit fit_line(std::span<const LinePoint> points) {
    if (points.size() < 2) throw InvalidArgument("fit_line: need at least two points");
    const double n = static_cast<double>(points.size());
    double mz = 0, mt = 0;
    for (const auto& p : points) {
        mz += p.z;
        mt += p.delay;
    }
    mz /= n;
    mt /= n;
    double sxx = 0, sxy = 0;
    for (const auto& p : points) {
        sxx += (p.z - mz) * (p.z - mz);
        sxy += (p.z - mz) * (p.delay - mt);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("fit_line: all positions identical, slope undefined");

    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mt - fit.slope * mz;
    double ss = 0;
    fit.residuals.reserve(points.size());
    for (const auto& p : points) {
        const double r = p.delay - (fit.slope * p.z + fit.intercept);
        fit.residuals.push_back(r);
        ss += r * r;
    }
    const double rms = std::sqrt(ss / n);
    fit.rmse_position = rms == 0.0 ? 0.0 : rms / std::abs(fit.slope);
    return fit;
}

struct RobustLineFit {
    LineFit fit;                     ///< refit on the inliers
    std::vector<std::size_t> outliers; ///< indices into the input, ascending
};

/// One pass of outlier rejection: points whose |residual| exceeds three times
/// the median |residual| (and `residual_floor`) are dropped, largest first, at
/// most floor(N/4) of them, then the line is refit.
inline RobustLineFit fit_line_robust(std::span<const LinePoint> points, double residual_floor = 0.0) {
    RobustLineFit out{fit_line(points), {}};
    std::vector<double> abs_res;
    for (double r : out.fit.residuals) abs_res.push_back(std::abs(r));
    auto sorted = abs_res;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    const double threshold = std::max(3.0 * median, residual_floor);

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return abs_res[a] > abs_res[b]; });
    const std::size_t cap = points.size() / 4;
    for (std::size_t k = 0; k < cap && abs_res[order[k]] > threshold; ++k) out.outliers.push_back(order[k]);
    if (out.outliers.empty()) return out;
    std::sort(out.outliers.begin(), out.outliers.end());

    std::vector<LinePoint> kept;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (!std::binary_search(out.outliers.begin(), out.outliers.end(), i)) kept.push_back(points[i]);
    out.fit = fit_line(kept);
    return out;
}

} // namespace aeloc::calibration
