#pragma once

// Experiment configuration file (JSON). Every key is optional; missing keys
// take the default-specimen values and unknown keys are rejected.
//
// {
//   "specimen": {
//     "length_mm": 4000, "sensor_1_mm": 800, "sensor_2_mm": 3200,
//     "velocity_km_s": [[5000, 1.02], [35000, 1.7], [45000, 1.7], [75000, 2.38]],
//     "attenuation_db_per_m": 5,            // or [[hz, db_per_m], ...]
//     "noise_snr_db": 20,                   // null: noiseless
//     "sample_rate_hz": 1000000, "record_length": 16384,
//     "reflection_coefficient": 0
//   },
//   "experiment": {
//     "prototype_positions_mm": [...], "test_positions_mm": [...],
//     "test_kind": "continuous", "seed": 1, "amplitude": 1,
//     "burst_center_hz": 40000, "burst_cycles": 10, "burst_onset_s": 0.001,
//     "continuous_band_hz": [20000, 80000]
//   }
// }

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aeloc/error.hpp"
#include "aeloc/io/text.hpp"
#include "aeloc/simulator/source.hpp"
#include "aeloc/simulator/specimen.hpp"

namespace aeloc::sim {

struct ExperimentConfig {
    SpecimenModel specimen = default_specimen();
    std::vector<double> prototype_positions = default_prototype_positions();
    std::vector<double> test_positions = default_hole_positions();
    SourceKind test_kind = SourceKind::ContinuousNoise;
    SourceSpec source; ///< template for burst / noise parameters; position, kind and seed are set per source
    std::uint64_t seed = 1;
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    if (!obj.is_object()) throw IoError("'" + where + "' must be an object");
    for (const auto& [key, _] : obj.items())
        if (!known.count(key)) throw IoError("unknown key '" + key + "' in '" + where + "'");
}

inline PiecewiseLinear curve_from_json(const json& j, const std::string& key) {
    if (j.is_number()) return PiecewiseLinear::constant(j.get<double>());
    if (!j.is_array()) throw IoError("'" + key + "' must be a number or a list of [hz, value] pairs");
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2) throw IoError("'" + key + "' entries must be [hz, value] pairs");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return PiecewiseLinear(std::move(pts));
}

inline json curve_to_json(const PiecewiseLinear& c) {
    json arr = json::array();
    for (const auto& [x, y] : c.points()) arr.push_back({x, y});
    return arr;
}

} // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& root) {
    using detail::json;
    ExperimentConfig cfg;
    detail::reject_unknown(root, {"specimen", "experiment"}, "<root>");
    try {
        if (root.contains("specimen")) {
            const auto& s = root["specimen"];
            detail::reject_unknown(s, {"length_mm", "sensor_1_mm", "sensor_2_mm", "velocity_km_s", "attenuation_db_per_m",
                                       "noise_snr_db", "sample_rate_hz", "record_length", "reflection_coefficient"},
                                   "specimen");
            auto& m = cfg.specimen;
            m.length = s.value("length_mm", m.length);
            m.sensor_1 = s.value("sensor_1_mm", m.sensor_1);
            m.sensor_2 = s.value("sensor_2_mm", m.sensor_2);
            if (s.contains("velocity_km_s")) m.velocity = detail::curve_from_json(s["velocity_km_s"], "velocity_km_s");
            if (s.contains("attenuation_db_per_m"))
                m.attenuation = detail::curve_from_json(s["attenuation_db_per_m"], "attenuation_db_per_m");
            if (s.contains("noise_snr_db")) {
                if (s["noise_snr_db"].is_null())
                    m.noise_snr_db.reset();
                else
                    m.noise_snr_db = s["noise_snr_db"].get<double>();
            }
            m.sample_rate = s.value("sample_rate_hz", m.sample_rate);
            m.record_length = s.value("record_length", m.record_length);
            m.reflection_coefficient = s.value("reflection_coefficient", m.reflection_coefficient);
        }
        if (root.contains("experiment")) {
            const auto& e = root["experiment"];
            detail::reject_unknown(e, {"prototype_positions_mm", "test_positions_mm", "test_kind", "seed", "amplitude",
                                       "burst_center_hz", "burst_cycles", "burst_onset_s", "continuous_band_hz"},
                                   "experiment");
            cfg.prototype_positions = e.value("prototype_positions_mm", cfg.prototype_positions);
            cfg.test_positions = e.value("test_positions_mm", cfg.test_positions);
            if (e.contains("test_kind")) cfg.test_kind = parse_source_kind(e["test_kind"].get<std::string>());
            cfg.seed = e.value("seed", cfg.seed);
            auto& src = cfg.source;
            src.amplitude = e.value("amplitude", src.amplitude);
            src.burst_center_hz = e.value("burst_center_hz", src.burst_center_hz);
            src.burst_cycles = e.value("burst_cycles", src.burst_cycles);
            src.burst_onset_s = e.value("burst_onset_s", src.burst_onset_s);
            if (e.contains("continuous_band_hz")) {
                const auto& b = e["continuous_band_hz"];
                if (!b.is_array() || b.size() != 2) throw IoError("'continuous_band_hz' must be [low, high]");
                src.band_low_hz = b[0].get<double>();
                src.band_high_hz = b[1].get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("config: ") + e.what());
    }
    cfg.specimen.validate();
    return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    using detail::json;
    const auto& m = cfg.specimen;
    json s;
    s["length_mm"] = m.length;
    s["sensor_1_mm"] = m.sensor_1;
    s["sensor_2_mm"] = m.sensor_2;
    s["velocity_km_s"] = detail::curve_to_json(m.velocity);
    s["attenuation_db_per_m"] = detail::curve_to_json(m.attenuation);
    s["noise_snr_db"] = m.noise_snr_db ? json(*m.noise_snr_db) : json(nullptr);
    s["sample_rate_hz"] = m.sample_rate;
    s["record_length"] = m.record_length;
    s["reflection_coefficient"] = m.reflection_coefficient;
    json e;
    e["prototype_positions_mm"] = cfg.prototype_positions;
    e["test_positions_mm"] = cfg.test_positions;
    e["test_kind"] = to_string(cfg.test_kind);
    e["seed"] = cfg.seed;
    e["amplitude"] = cfg.source.amplitude;
    e["burst_center_hz"] = cfg.source.burst_center_hz;
    e["burst_cycles"] = cfg.source.burst_cycles;
    e["burst_onset_s"] = cfg.source.burst_onset_s;
    e["continuous_band_hz"] = {cfg.source.band_low_hz, cfg.source.band_high_hz};
    return json{{"specimen", s}, {"experiment", e}};
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError("config file '" + path.string() + "' does not exist");
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(io::read_file(path), nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    try {
        return config_from_json(root);
    } catch (const Error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

inline void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
    io::atomic_write(path, config_to_json(cfg).dump(2) + "\n");
}

} // namespace aeloc::sim
