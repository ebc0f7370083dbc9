#pragma once

#include "aeloc/signal/butterworth.hpp"
#include "aeloc/signal/correlation.hpp"
#include "aeloc/signal/waveform.hpp"

namespace aeloc {

/// Filters both channels identically and estimates the inter-sensor delay
/// dt = t_arrival(sensor 1) - t_arrival(sensor 2). On a 1-D specimen with the
/// source between the sensors, dt = (d1 - d2) / v grows with the distance from
/// sensor 1.
inline DelayEstimate measure_delay(const WaveformPair& pair, const DigitalFilter& filter, int max_lag,
                                   bool refine = true) {
    const auto filtered = apply_filter(filter, pair);
    return estimate_delay(cross_correlate(filtered.ch2, filtered.ch1, max_lag), refine);
}

} // namespace aeloc
