#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "aeloc/error.hpp"
#include "aeloc/signal/waveform.hpp"

namespace aeloc {

/// Unnormalized cross-correlation sums for lags -max_lag..+max_lag.
struct CorrelationFunction {
    std::vector<double> values; ///< values[lag + max_lag]
    int max_lag = 0;
    double sample_rate = 0;

    double at(int lag) const { return values[static_cast<std::size_t>(lag + max_lag)]; }
    int lag_of(std::size_t index) const noexcept { return static_cast<int>(index) - max_lag; }
};

struct DelayEstimate {
    double delay = 0;          ///< seconds
    double lag = 0;            ///< samples, fractional when refined
    double peak_value = 0;
    double peak_sharpness = 0; ///< peak / second-highest local maximum, >= 1
};

namespace detail {

// Eight independent partial sums; the summation order depends only on the
// element index, so dot(x, y) and dot(y, x) are bit-identical.
inline double dot(const double* x, const double* y, std::size_t n) noexcept {
    double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        for (std::size_t k = 0; k < 8; ++k) acc[k] += x[i + k] * y[i + k];
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i] * y[i];
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

} // namespace detail

/// R(lag) = sum_t y1(t) * y2(t + lag), summed over the samples both records cover.
/// If y2 is y1 delayed by d samples the peak sits at lag +d.
inline CorrelationFunction cross_correlate(const Waveform& y1, const Waveform& y2, int max_lag) {
    require_same_rate(y1, y2, "cross_correlate");
    const auto n1 = static_cast<long>(y1.size());
    const auto n2 = static_cast<long>(y2.size());
    if (max_lag < 0) throw InvalidArgument("cross_correlate: negative max_lag");
    if (max_lag >= std::min(n1, n2))
        throw InvalidArgument("cross_correlate: max_lag " + std::to_string(max_lag) +
                              " must be shorter than both records (" + std::to_string(std::min(n1, n2)) + ")");

    CorrelationFunction r;
    r.max_lag = max_lag;
    r.sample_rate = y1.sample_rate();
    r.values.resize(2 * static_cast<std::size_t>(max_lag) + 1);
    const double* a = y1.samples().data();
    const double* b = y2.samples().data();
    for (long lag = -max_lag; lag <= max_lag; ++lag) {
        const long first = std::max(0L, -lag);
        const long last = std::min(n1, n2 - lag);
        r.values[static_cast<std::size_t>(lag + max_lag)] =
            last > first ? detail::dot(a + first, b + first + lag, static_cast<std::size_t>(last - first)) : 0.0;
    }
    return r;
}

/// Peak of the correlation, optionally refined by a three-point parabola.
inline DelayEstimate estimate_delay(const CorrelationFunction& r, bool refine = true) {
    const auto& v = r.values;
    if (v.empty() || std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }))
        throw NoSignal("estimate_delay: correlation is identically zero (no signal)");

    const auto peak_it = std::max_element(v.begin(), v.end());
    const auto peak = static_cast<std::size_t>(peak_it - v.begin());
    if (peak == 0 || peak + 1 == v.size())
        throw DelayWindowExceeded("estimate_delay: correlation peak on boundary lag " +
                                  std::to_string(r.lag_of(peak)) + "; delay window of +/-" +
                                  std::to_string(r.max_lag) + " samples exceeded");

    DelayEstimate est;
    est.peak_value = *peak_it;
    est.lag = r.lag_of(peak);
    if (refine) {
        const double left = v[peak - 1], mid = v[peak], right = v[peak + 1];
        const double denom = left - 2.0 * mid + right;
        if (denom < 0.0) est.lag += std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
    }
    est.delay = est.lag / r.sample_rate;

    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (i != peak && v[i] > v[i - 1] && v[i] >= v[i + 1]) second = std::max(second, v[i]);
    est.peak_sharpness = (second > 0.0 && est.peak_value > 0.0)
                             ? std::max(1.0, est.peak_value / second)
                             : std::numeric_limits<double>::infinity();
    return est;
}

} // namespace aeloc
