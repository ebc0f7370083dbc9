#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "aeloc/error.hpp"

namespace aeloc::sim {

namespace detail {
// FFTW's planner is not thread-safe.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Real-to-complex forward transform of length n (n/2 + 1 bins), unnormalized.
inline std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> in(x);
    std::vector<std::complex<double>> out(x.size() / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    if (!plan) throw Error("rfft: FFTW planning failed");
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

/// Inverse of rfft, normalized so irfft(rfft(x), n) == x.
inline std::vector<double> irfft(const std::vector<std::complex<double>>& spectrum, std::size_t n) {
    if (spectrum.size() != n / 2 + 1) throw InvalidArgument("irfft: spectrum size does not match length");
    std::vector<std::complex<double>> in(spectrum);
    std::vector<double> out(n);
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                                    FFTW_ESTIMATE);
    }
    if (!plan) throw Error("irfft: FFTW planning failed");
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return out;
}

} // namespace aeloc::sim
