#pragma once

// Dataset layout written by run_experiment:
//
//   <dir>/specimen.json     configuration echo (read back by calibrate/learn/evaluate)
//   <dir>/manifest.csv      file,position_mm,kind,role
//   <dir>/prototype_NN.csv  discrete-burst pairs at the prototype sites
//   <dir>/test_NN.csv       pairs of the requested kind at the test sites

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aeloc/io/text.hpp"
#include "aeloc/signal/waveform_io.hpp"
#include "aeloc/simulator/config.hpp"
#include "aeloc/simulator/propagate.hpp"

namespace aeloc::sim {

inline constexpr std::string_view kManifestName = "manifest.csv";
inline constexpr std::string_view kSpecimenName = "specimen.json";

enum class Role { Prototype, Test };

inline std::string to_string(Role r) { return r == Role::Prototype ? "prototype" : "test"; }

struct ManifestEntry {
    std::string file; ///< relative to the dataset directory
    double position = 0; ///< mm, ground truth
    SourceKind kind = SourceKind::DiscreteBurst;
    Role role = Role::Prototype;
    bool outside_sensor_span = false;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

using Manifest = std::vector<ManifestEntry>;

inline std::string format_manifest(const Manifest& manifest) {
    std::string out = "file,position_mm,kind,role\n";
    for (const auto& e : manifest)
        out += e.file + "," + io::format_double(e.position) + "," + to_string(e.kind) + "," + to_string(e.role) + "\n";
    return out;
}

inline Manifest read_manifest(const std::filesystem::path& dir) {
    const auto path = dir / kManifestName;
    if (!std::filesystem::exists(path)) throw IoError("manifest '" + path.string() + "' not found");
    const auto text = io::read_file(path);
    Manifest out;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const auto line = io::trim(std::string_view(text).substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#' || line_no == 1) continue;
        const auto f = io::split(line, ',');
        try {
            if (f.size() != 4) throw IoError("expected 4 columns");
            ManifestEntry e;
            e.file = std::string(io::trim(f[0]));
            e.position = io::parse_double(f[1]);
            e.kind = parse_source_kind(std::string(io::trim(f[2])));
            const auto role = io::trim(f[3]);
            if (role == "prototype")
                e.role = Role::Prototype;
            else if (role == "test")
                e.role = Role::Test;
            else
                throw IoError("unknown role '" + std::string(role) + "'");
            out.push_back(std::move(e));
        } catch (const Error& err) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + err.what());
        }
    }
    return out;
}

inline Manifest filter_role(const Manifest& m, Role role) {
    Manifest out;
    for (const auto& e : m)
        if (e.role == role) out.push_back(e);
    return out;
}

/// splitmix64 finalizer; gives every source an independent seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t role, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (1 + (role << 20) + index);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline SourceSpec make_source(const ExperimentConfig& cfg, double position, SourceKind kind, Role role,
                              std::size_t index) {
    SourceSpec s = cfg.source;
    s.position = position;
    s.kind = kind;
    s.seed = mix_seed(cfg.seed, role == Role::Prototype ? 0 : 1, index);
    return s;
}

/// Simulates every prototype (discrete bursts) and test source and writes the dataset.
inline Manifest run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.specimen.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

    Manifest manifest;
    auto emit = [&](Role role, const std::vector<double>& positions, SourceKind kind) {
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const auto spec = make_source(cfg, positions[i], kind, role, i);
            char name[32];
            std::snprintf(name, sizeof(name), "%s_%02zu.csv", role == Role::Prototype ? "prototype" : "test", i);
            write_waveform_pair(out_dir / name, simulate_source(spec, cfg.specimen));
            manifest.push_back({name, positions[i], kind, role, spec.outside_sensor_span(cfg.specimen)});
        }
    };
    emit(Role::Prototype, cfg.prototype_positions, SourceKind::DiscreteBurst);
    emit(Role::Test, cfg.test_positions, cfg.test_kind);

    save_config(out_dir / kSpecimenName, cfg);
    io::atomic_write(out_dir / kManifestName, format_manifest(manifest));
    return manifest;
}

} // namespace aeloc::sim
