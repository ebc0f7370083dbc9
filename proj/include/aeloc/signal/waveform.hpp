#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aeloc/error.hpp"

namespace aeloc {

/// Uniformly sampled, real-valued sensor signal.
///
/// Invariants: sample_rate > 0, at least one sample, all samples finite.
class Waveform {
public:
    Waveform(std::vector<double> samples, double sample_rate)
        : samples_(std::move(samples)), sample_rate_(sample_rate) {
        if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
            throw InvalidArgument("Waveform: sample rate must be positive, got " + std::to_string(sample_rate_));
        if (samples_.empty()) throw InvalidArgument("Waveform: no samples");
        for (std::size_t i = 0; i < samples_.size(); ++i)
            if (!std::isfinite(samples_[i]))
                throw InvalidArgument("Waveform: non-finite sample at index " + std::to_string(i));
    }

    /// All-zero waveform of `n` samples.
    static Waveform zeros(std::size_t n, double sample_rate) {
        return Waveform(std::vector<double>(n, 0.0), sample_rate);
    }

    std::span<const double> samples() const noexcept { return samples_; }
    double sample_rate() const noexcept { return sample_rate_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double duration() const noexcept { return static_cast<double>(samples_.size()) / sample_rate_; }
    double operator[](std::size_t i) const noexcept { return samples_[i]; }

    friend bool operator==(const Waveform&, const Waveform&) = default;

private:
    std::vector<double> samples_;
    double sample_rate_;
};

/// Signals from the two sensors of the antenna, recorded simultaneously.
struct WaveformPair {
    Waveform ch1;
    Waveform ch2;

    friend bool operator==(const WaveformPair&, const WaveformPair&) = default;
};

inline void require_same_rate(const Waveform& a, const Waveform& b, const char* what) {
    if (a.sample_rate() != b.sample_rate())
        throw InvalidArgument(std::string(what) + ": sample-rate mismatch (" + std::to_string(a.sample_rate()) +
                              " Hz vs " + std::to_string(b.sample_rate()) + " Hz)");
}

} // namespace aeloc
