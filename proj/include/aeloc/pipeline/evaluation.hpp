#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "aeloc/io/text.hpp"
#include "aeloc/pipeline/locator.hpp"

namespace aeloc::pipeline {

struct TestOutcome {
    std::string file;
    double true_position = 0; ///< mm
    std::optional<LocationEstimate> estimate;
    std::string error; ///< why no estimate was produced
    double abs_error = std::numeric_limits<double>::quiet_NaN();
    bool outlier = false;
};

struct EvaluationReport {
    std::vector<TestOutcome> tests;
    double mean_error = 0;         ///< mm, over located tests
    double mean_error_trimmed = 0; ///< mm, outliers excluded
    double max_error = 0;
    double min_error = 0;
    double sensor_separation = 0;  ///< mm
    double relative_error = 0;     ///< mean_error / sensor_separation
    double relative_error_trimmed = 0;
    std::vector<std::size_t> outliers;
    std::size_t failed = 0;
};

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

/// Values exceeding the median by more than 3 median absolute deviations,
/// largest first, at most floor(N/4) of them. Returned indices are ascending.
inline std::vector<std::size_t> mad_outliers(const std::vector<double>& values) {
    const double med = median(values);
    std::vector<double> dev;
    for (double v : values) dev.push_back(std::abs(v - med));
    const double mad = median(dev);
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] > values[b]; });
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < values.size() / 4 && values[order[k]] - med > 3.0 * mad; ++k) out.push_back(order[k]);
    std::sort(out.begin(), out.end());
    return out;
}

/// Aggregates per-test outcomes; tests without an estimate are counted as failed
/// and excluded from the error statistics.
inline EvaluationReport summarize(std::vector<TestOutcome> tests, double sensor_separation) {
    EvaluationReport r;
    r.tests = std::move(tests);
    r.sensor_separation = sensor_separation;
    std::vector<double> errors;
    std::vector<std::size_t> located;
    for (std::size_t i = 0; i < r.tests.size(); ++i) {
        auto& t = r.tests[i];
        if (!t.estimate) {
            ++r.failed;
            continue;
        }
        t.abs_error = std::abs(t.estimate->position - t.true_position);
        errors.push_back(t.abs_error);
        located.push_back(i);
    }
    if (errors.empty()) throw Error("evaluate: no test source could be located");

    for (std::size_t k : mad_outliers(errors)) {
        r.outliers.push_back(located[k]);
        r.tests[located[k]].outlier = true;
    }
    double sum = 0, sum_trim = 0;
    std::size_t n_trim = 0;
    r.max_error = errors.front();
    r.min_error = errors.front();
    for (const auto& t : r.tests) {
        if (!t.estimate) continue;
        sum += t.abs_error;
        r.max_error = std::max(r.max_error, t.abs_error);
        r.min_error = std::min(r.min_error, t.abs_error);
        if (!t.outlier) {
            sum_trim += t.abs_error;
            ++n_trim;
        }
    }
    r.mean_error = sum / static_cast<double>(errors.size());
    r.mean_error_trimmed = sum_trim / static_cast<double>(n_trim);
    r.relative_error = r.mean_error / sensor_separation;
    r.relative_error_trimmed = r.mean_error_trimmed / sensor_separation;
    return r;
}

inline std::string format_evaluation(const EvaluationReport& r) {
    std::string out = "file,true_mm,estimated_mm,abs_error_mm,delay_s,top_weight,extrapolated,outlier,status\n";
    for (const auto& t : r.tests) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out += t.file + "," + io::format_double(t.true_position) + "," +
               io::format_double(t.estimate ? t.estimate->position : nan) + "," + io::format_double(t.abs_error) + "," +
               io::format_double(t.estimate ? t.estimate->delay : nan) + "," +
               io::format_double(t.estimate ? t.estimate->top_weight : nan) + "," +
               (t.estimate && t.estimate->extrapolated ? "1" : "0") + "," + (t.outlier ? "1" : "0") + "," +
               (t.estimate ? "ok" : "failed") + "\n";
    }
    std::string outliers;
    for (auto i : r.outliers) outliers += (outliers.empty() ? "" : " ") + std::to_string(i);
    out += "# tests=" + std::to_string(r.tests.size()) + "\n";
    out += "# failed=" + std::to_string(r.failed) + "\n";
    out += "# mean_error_mm=" + io::format_double(r.mean_error) + "\n";
    out += "# mean_error_trimmed_mm=" + io::format_double(r.mean_error_trimmed) + "\n";
    out += "# min_error_mm=" + io::format_double(r.min_error) + "\n";
    out += "# max_error_mm=" + io::format_double(r.max_error) + "\n";
    out += "# sensor_separation_mm=" + io::format_double(r.sensor_separation) + "\n";
    out += "# relative_error=" + io::format_double(r.relative_error) + "\n";
    out += "# relative_error_trimmed=" + io::format_double(r.relative_error_trimmed) + "\n";
    out += "# outliers=" + (outliers.empty() ? std::string("none") : outliers) + "\n";
    return out;
}

} // namespace aeloc::pipeline
