#pragma once

// Two-channel waveform text file:
//
//   # sample_rate_hz=<integer>
//   <ch1>,<ch2>
//   ...

#include <cmath>
#include <filesystem>
#include <string>
#include <string_view>

#include "aeloc/io/text.hpp"
#include "aeloc/signal/waveform.hpp"

namespace aeloc {

inline constexpr std::string_view kSampleRateTag = "# sample_rate_hz=";

inline std::string format_waveform_pair(const WaveformPair& pair) {
    require_same_rate(pair.ch1, pair.ch2, "write_waveform_pair");
    if (pair.ch1.size() != pair.ch2.size()) throw InvalidArgument("write_waveform_pair: channel lengths differ");
    const double rate = pair.ch1.sample_rate();
    if (rate != std::round(rate)) throw InvalidArgument("write_waveform_pair: sample rate must be an integer in Hz");
    std::string out;
    out.reserve(pair.ch1.size() * 44 + 32);
    out += kSampleRateTag;
    out += std::to_string(static_cast<long long>(rate));
    out += '\n';
    for (std::size_t i = 0; i < pair.ch1.size(); ++i) {
        out += io::format_double(pair.ch1[i]);
        out += ',';
        out += io::format_double(pair.ch2[i]);
        out += '\n';
    }
    return out;
}

inline void write_waveform_pair(const std::filesystem::path& path, const WaveformPair& pair) {
    io::atomic_write(path, format_waveform_pair(pair));
}

inline WaveformPair parse_waveform_pair(std::string_view text, const std::string& origin = "<memory>") {
    std::vector<double> ch1, ch2;
    double rate = 0;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const auto line = io::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        try {
            if (!have_header) {
                if (line.substr(0, kSampleRateTag.size()) != kSampleRateTag)
                    throw IoError("missing '# sample_rate_hz=' header");
                rate = static_cast<double>(io::parse_int(line.substr(kSampleRateTag.size())));
                have_header = true;
                continue;
            }
            if (line.front() == '#') continue;
            const auto fields = io::split(line, ',');
            if (fields.size() != 2) throw IoError("expected 2 columns, found " + std::to_string(fields.size()));
            ch1.push_back(io::parse_double(fields[0]));
            ch2.push_back(io::parse_double(fields[1]));
        } catch (const Error& e) {
            throw IoError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header) throw IoError(origin + ": empty waveform file");
    try {
        return {Waveform(std::move(ch1), rate), Waveform(std::move(ch2), rate)};
    } catch (const Error& e) {
        throw IoError(origin + ": " + e.what());
    }
}

inline WaveformPair read_waveform_pair(const std::filesystem::path& path) {
    return parse_waveform_pair(io::read_file(path), path.string());
}

/// True when the file starts with the waveform header line.
inline bool looks_like_waveform_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string first;
    return in && std::getline(in, first) && first.rfind(kSampleRateTag, 0) == 0;
}

} // namespace aeloc
