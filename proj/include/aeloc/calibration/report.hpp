#pragma once

// Calibration report: one row per band, then a summary block of `# key=value` lines.
// The chosen filter is stored separately as `key=value` text (see format_filter_spec).

#include <filesystem>
#include <string>
#include <string_view>

#include "aeloc/calibration/band_sweep.hpp"
#include "aeloc/io/text.hpp"

namespace aeloc::calibration {

inline std::string format_report(const CalibrationResult& r) {
    std::string out = "f_low_hz,f_high_hz,rmse_mm,slope_s_per_mm\n";
    for (const auto& rec : r.records)
        out += io::format_double(rec.band.f_low) + "," + io::format_double(rec.band.f_high) + "," +
               io::format_double(rec.rmse) + "," + io::format_double(rec.ok() ? rec.slope : std::nan("")) + "\n";
    std::string outliers;
    for (auto i : r.outliers) outliers += (outliers.empty() ? "" : " ") + std::to_string(i);
    out += "# bands=" + std::to_string(r.records.size()) + "\n";
    out += "# best_f_low_hz=" + io::format_double(r.best_band.f_low) + "\n";
    out += "# best_f_high_hz=" + io::format_double(r.best_band.f_high) + "\n";
    out += "# best_rmse_mm=" + io::format_double(r.records[r.best_index].rmse) + "\n";
    out += "# final_rmse_mm=" + io::format_double(r.fit.rmse_position) + "\n";
    out += "# slope_s_per_mm=" + io::format_double(r.fit.slope) + "\n";
    out += "# intercept_s=" + io::format_double(r.fit.intercept) + "\n";
    out += "# velocity_km_s=" + io::format_double(r.velocity) + "\n";
    out += "# outliers=" + (outliers.empty() ? std::string("none") : outliers) + "\n";
    out += "# flat_surface=" + std::string(r.flat_surface ? "1" : "0") + "\n";
    return out;
}

inline std::string format_filter_spec(const FilterSpec& f) {
    return "# bandpass filter\nf_low_hz=" + io::format_double(f.f_low) + "\nf_high_hz=" + io::format_double(f.f_high) +
           "\norder=" + std::to_string(f.order) + "\n";
}

inline FilterSpec parse_filter_spec(std::string_view text, const std::string& origin = "<memory>") {
    FilterSpec f;
    bool lo = false, hi = false;
    for (auto line : io::split(text, '\n')) {
        line = io::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw IoError(origin + ": expected key=value, got '" + std::string(line) + "'");
        const auto key = io::trim(line.substr(0, eq));
        const auto value = line.substr(eq + 1);
        try {
            if (key == "f_low_hz")
                f.f_low = io::parse_double(value), lo = true;
            else if (key == "f_high_hz")
                f.f_high = io::parse_double(value), hi = true;
            else if (key == "order")
                f.order = static_cast<int>(io::parse_int(value));
            else
                throw IoError("unknown key '" + std::string(key) + "'");
        } catch (const Error& e) {
            throw IoError(origin + ": " + e.what());
        }
    }
    if (!lo || !hi) throw IoError(origin + ": filter file needs f_low_hz and f_high_hz");
    return f;
}

inline FilterSpec read_filter_spec(const std::filesystem::path& path) {
    return parse_filter_spec(io::read_file(path), path.string());
}

} // namespace aeloc::calibration
