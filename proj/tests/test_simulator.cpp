#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "aeloc/calibration/band_sweep.hpp"
#include "aeloc/io/text.hpp"
#include "aeloc/signal/delay.hpp"
#include "aeloc/signal/waveform_io.hpp"
#include "aeloc/simulator/config.hpp"
#include "aeloc/simulator/experiment.hpp"
#include "aeloc/simulator/propagate.hpp"
#include "support/sim_data.hpp"

using namespace aeloc;
using namespace aeloc::sim;
namespace fs = std::filesystem;

namespace {

double energy(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
}

// Oracle: naive DFT power over bins with frequency in [lo, hi].
double dft_power(const std::vector<double>& x, double fs, double lo, double hi) {
    const std::size_t n = x.size();
    double total = 0;
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double f = k * fs / n;
        if (f < lo || f > hi) continue;
        double re = 0, im = 0;
        for (std::size_t t = 0; t < n; ++t) {
            const double ph = 2 * std::numbers::pi * static_cast<double>((k * t) % n) / n;
            re += x[t] * std::cos(ph);
            im -= x[t] * std::sin(ph);
        }
        total += (k == 0 || 2 * k == n ? 1 : 2) * (re * re + im * im);
    }
    return total;
}

fs::path scratch_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("aeloc_sim_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.specimen.record_length = 4096;
    return cfg;
}

} // namespace

TEST(DefaultSpecimen, BandSpecimenGeometry) {
    const auto m = default_specimen();
    EXPECT_EQ(m.sensor_separation(), 2400.0);
    EXPECT_DOUBLE_EQ(m.velocity(40e3), 1.7);
    EXPECT_DOUBLE_EQ(m.velocity(35e3), 1.7);
    EXPECT_DOUBLE_EQ(m.velocity(45e3), 1.7);
    EXPECT_NEAR(m.velocity(5e3), 1.02, 1e-12);
    EXPECT_NEAR(m.velocity(75e3), 2.38, 1e-12);
    EXPECT_NEAR(std::abs(geometric_delay(m.sensor_1, m, 1.7)), 1.41176e-3, 1e-8);
    EXPECT_EQ(m.sample_rate, 1e6);
    EXPECT_EQ(*m.noise_snr_db, 20.0);
    EXPECT_EQ(m.attenuation(40e3), 5.0);
    const auto holes = default_hole_positions(m);
    ASSERT_EQ(holes.size(), 23u);
    EXPECT_EQ(holes.front(), 900.0);
    EXPECT_EQ(holes.back(), 3100.0);
    const auto protos = default_prototype_positions(m);
    ASSERT_EQ(protos.size(), 12u);
    EXPECT_EQ(protos[1] - protos[0], 200.0);
    EXPECT_EQ(evenly_spaced_positions(900, 3100, 400).size(), 6u);
}

TEST(SpecimenModel, Validation) {
    auto m = default_specimen();
    m.record_length = 2000;
    EXPECT_THROW(m.validate(), InvalidArgument);
    m = default_specimen();
    m.sensor_1 = 3300;
    EXPECT_THROW(m.validate(), InvalidArgument);
    m = default_specimen();
    m.velocity = PiecewiseLinear::constant(0.0);
    EXPECT_THROW(m.validate(), InvalidArgument);
    m = default_specimen();
    m.attenuation = PiecewiseLinear::constant(-1.0);
    EXPECT_THROW(m.validate(), InvalidArgument);
    EXPECT_THROW(PiecewiseLinear({{1, 1}, {1, 2}}), InvalidArgument);
}

TEST(SynthSource, BurstPeakIsAmplitude) {
    const auto m = default_specimen();
    SourceSpec s;
    const auto x = synth_source(s, m);
    double peak = 0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    EXPECT_NEAR(peak, 1.0, 1e-9);
    s.amplitude = 3.5;
    peak = 0;
    for (double v : synth_source(s, m)) peak = std::max(peak, std::abs(v));
    EXPECT_NEAR(peak, 3.5, 1e-9);
}

TEST(SynthSource, SameSeedIsBitIdentical) {
    const auto m = default_specimen();
    SourceSpec s;
    s.kind = SourceKind::ContinuousNoise;
    s.seed = 99;
    EXPECT_EQ(synth_source(s, m), synth_source(s, m));
    EXPECT_EQ(simulate_source(s, m), simulate_source(s, m));
    auto t = s;
    t.seed = 100;
    EXPECT_NE(synth_source(s, m), synth_source(t, m));
}

TEST(SynthSource, ContinuousBandHoldsItsPower) {
    auto m = default_specimen();
    m.record_length = 4096;
    SourceSpec s;
    s.kind = SourceKind::ContinuousNoise;
    s.band_low_hz = 30e3;
    s.band_high_hz = 50e3;
    const auto x = synth_source(s, m);
    const double total = dft_power(x, m.sample_rate, 0, m.sample_rate / 2);
    EXPECT_GE(dft_power(x, m.sample_rate, 28e3, 52e3), 0.95 * total);
    EXPECT_NEAR(std::sqrt(energy(x) / x.size()), 1.0, 1e-9);
}

TEST(SynthSource, RejectsBadSpecs) {
    const auto m = default_specimen();
    SourceSpec s;
    s.burst_center_hz = 600e3;
    EXPECT_THROW(synth_source(s, m), InvalidArgument);
    s = {};
    s.burst_onset_s = 0.1;
    EXPECT_THROW(synth_source(s, m), InvalidArgument);
    s = {};
    s.kind = SourceKind::ContinuousNoise;
    s.band_high_hz = 700e3;
    EXPECT_THROW(synth_source(s, m), InvalidArgument);
    EXPECT_EQ(parse_source_kind("continuous"), SourceKind::ContinuousNoise);
    EXPECT_THROW(parse_source_kind("leak"), InvalidArgument);
}

TEST(Propagate, MidpointChannelsAreIdentical) {
    auto m = default_specimen();
    m.attenuation = PiecewiseLinear::constant(0.0);
    m.noise_snr_db.reset();
    SourceSpec s;
    s.position = 0.5 * (m.sensor_1 + m.sensor_2);
    for (auto kind : {SourceKind::DiscreteBurst, SourceKind::ContinuousNoise}) {
        s.kind = kind;
        const auto p = simulate_source(s, m);
        double scale = 0;
        for (double v : p.ch1.samples()) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < p.ch1.size(); ++i) EXPECT_NEAR(p.ch1[i], p.ch2[i], 1e-9 * scale);
    }
}

TEST(Propagate, FirstHoleDelayRecovered) {
    const auto m = oracle::nondispersive(1.7, std::nullopt, 16384);
    SourceSpec s;
    s.position = 900;
    const double truth = geometric_delay(900, m, 1.7);
    EXPECT_NEAR(truth, -1294.1e-6, 0.05e-6);
    const auto filter = design_bandpass({35e3, 45e3, 4}, m.sample_rate);
    const auto d = measure_delay(simulate_source(s, m), filter, m.default_max_lag(), true);
    EXPECT_NEAR(d.delay, truth, 1.0 / m.sample_rate);
}

TEST(Propagate, DoublingAttenuationDoublesDecibelRatio) {
    auto m = oracle::nondispersive(1.7, std::nullopt);
    SourceSpec s;
    s.position = 1100;
    auto ratio_db = [&](double alpha) {
        m.attenuation = PiecewiseLinear::constant(alpha);
        const auto p = simulate_source(s, m);
        return 10 * std::log10(energy(p.ch1.samples()) / energy(p.ch2.samples()));
    };
    const double r5 = ratio_db(5), r10 = ratio_db(10);
    // The nearer sensor sees 5 dB/m over 1.8 m less path.
    EXPECT_NEAR(r5, 5 * 1.8, 1e-6);
    EXPECT_NEAR(r10 / r5, 2.0, 1e-9);
}

TEST(Propagate, LosslessPathConservesEnergy) {
    auto m = default_specimen();
    m.attenuation = PiecewiseLinear::constant(0.0);
    m.noise_snr_db.reset();
    for (auto kind : {SourceKind::DiscreteBurst, SourceKind::ContinuousNoise}) {
        SourceSpec s;
        s.kind = kind;
        s.position = 1234;
        const auto x = synth_source(s, m);
        const auto p = propagate(x, s, m);
        EXPECT_NEAR(energy(p.ch1.samples()), energy(x), 0.01 * energy(x));
        EXPECT_NEAR(energy(p.ch2.samples()), energy(x), 0.01 * energy(x));
    }
}

TEST(Propagate, NoiseMatchesConfiguredSnr) {
    for (double snr : {0.0, 20.0, 40.0}) {
        auto m = default_specimen();
        m.noise_snr_db = snr;
        auto clean_m = m;
        clean_m.noise_snr_db.reset();
        SourceSpec s;
        s.position = 1500;
        s.seed = 5;
        for (auto kind : {SourceKind::DiscreteBurst, SourceKind::ContinuousNoise}) {
            s.kind = kind;
            const auto noisy = simulate_source(s, m), clean = simulate_source(s, clean_m);
            for (int ch = 0; ch < 2; ++ch) {
                const auto& a = ch ? noisy.ch2 : noisy.ch1;
                const auto& b = ch ? clean.ch2 : clean.ch1;
                double noise = 0;
                for (std::size_t i = 0; i < a.size(); ++i) noise += (a[i] - b[i]) * (a[i] - b[i]);
                EXPECT_NEAR(10 * std::log10(energy(b.samples()) / noise), snr, 1.0);
            }
        }
    }
}

TEST(Propagate, PlateauSlopeMatchesVelocity) {
    auto m = default_specimen();
    m.record_length = 4096;
    const auto src = oracle::burst_sources(m, default_prototype_positions(m));
    const auto rec = calibration::evaluate_band(src, {35e3, 45e3, 4}, oracle::sweep_options(m));
    ASSERT_TRUE(rec.ok());
    EXPECT_NEAR(std::abs(rec.slope), 2.0 / 1.7e6, 0.02 * 2.0 / 1.7e6);
}

TEST(Propagate, DelayGroundTruthAtThirtyDecibels) {
    const auto m = oracle::nondispersive(1.7, 30.0);
    const auto filter = design_bandpass({30e3, 50e3, 4}, m.sample_rate);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> pos(m.sensor_1, m.sensor_2);
    for (int i = 0; i < 20; ++i) {
        SourceSpec s;
        s.position = pos(rng);
        s.seed = 100 + i;
        s.kind = i % 2 ? SourceKind::ContinuousNoise : SourceKind::DiscreteBurst;
        const auto d = measure_delay(simulate_source(s, m), filter, m.default_max_lag(), true);
        EXPECT_NEAR(d.delay, geometric_delay(s.position, m, 1.7), 1.0 / m.sample_rate) << s.position;
    }
}

TEST(Propagate, EquidistantSourceHasZeroDelay) {
    const auto m = oracle::nondispersive(1.7, 20.0);
    SourceSpec s;
    s.position = 2000;
    const auto d = measure_delay(simulate_source(s, m), design_bandpass({35e3, 45e3, 4}, m.sample_rate), m.default_max_lag(), true);
    EXPECT_NEAR(d.delay, 0.0, 0.5e-6);
}

TEST(Propagate, ReflectionsAddScaledCopies) {
    auto m = oracle::nondispersive(1.7, std::nullopt);
    m.attenuation = PiecewiseLinear::constant(0.0);
    SourceSpec s;
    s.position = 1000;
    const auto direct = simulate_source(s, m);
    m.reflection_coefficient = 0.5;
    const auto echo = simulate_source(s, m);
    // Lossless paths: each of the two reflections carries R^2 of the direct energy.
    std::vector<double> diff(direct.ch1.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = echo.ch1[i] - direct.ch1[i];
    EXPECT_NEAR(energy(diff), 2 * 0.25 * energy(direct.ch1.samples()), 0.01 * energy(direct.ch1.samples()));
    EXPECT_TRUE((SourceSpec{.position = 500}).outside_sensor_span(m));
    EXPECT_FALSE((SourceSpec{.position = 800}).outside_sensor_span(m));
}

TEST(Config, JsonRoundTrip) {
    auto cfg = small_config();
    cfg.specimen.noise_snr_db.reset();
    cfg.specimen.attenuation = PiecewiseLinear({{1e3, 2.0}, {1e5, 8.0}});
    cfg.test_positions = {1000, 1500.5};
    cfg.test_kind = SourceKind::DiscreteBurst;
    cfg.seed = 77;
    cfg.source.band_low_hz = 25e3;
    const auto back = config_from_json(config_to_json(cfg));
    EXPECT_EQ(config_to_json(back).dump(), config_to_json(cfg).dump());
    EXPECT_FALSE(back.specimen.noise_snr_db.has_value());
    EXPECT_EQ(back.specimen.attenuation, cfg.specimen.attenuation);
    EXPECT_EQ(back.seed, 77u);
}

TEST(Config, PartialConfigKeepsDefaults) {
    const auto cfg = config_from_json(nlohmann::json::parse(R"({"specimen": {"velocity_km_s": 3.0, "attenuation_db_per_m": 0}})"));
    EXPECT_EQ(cfg.specimen.velocity(40e3), 3.0);
    EXPECT_EQ(cfg.specimen.attenuation(40e3), 0.0);
    EXPECT_EQ(cfg.prototype_positions.size(), 12u);
    EXPECT_EQ(cfg.test_kind, SourceKind::ContinuousNoise);
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"specimen": {"colour": 1}})")), IoError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"extra": {}})")), IoError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"specimen": {"length_mm": "long"}})")), IoError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"specimen": {"record_length": 100}})")), InvalidArgument);
    try {
        load_config("/nonexistent/dir/cfg.json");
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/cfg.json"), std::string::npos);
    }
}

TEST(RunExperiment, DefaultCounts) {
    const auto dir = scratch_dir("counts");
    const auto manifest = run_experiment(small_config(), dir);
    EXPECT_EQ(filter_role(manifest, Role::Prototype).size(), 12u);
    EXPECT_EQ(filter_role(manifest, Role::Test).size(), 23u);
    std::size_t csv = 0;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv" && e.path().filename() != "manifest.csv") ++csv;
    EXPECT_EQ(csv, 35u);
    const auto back = read_manifest(dir);
    ASSERT_EQ(back.size(), manifest.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].file, manifest[i].file);
        EXPECT_EQ(back[i].position, manifest[i].position);
        EXPECT_EQ(back[i].kind, manifest[i].kind);
    }
    EXPECT_EQ(manifest.front().kind, SourceKind::DiscreteBurst);
    EXPECT_EQ(manifest.back().kind, SourceKind::ContinuousNoise);
    EXPECT_EQ(read_waveform_pair(dir / manifest[3].file).ch1.size(), 4096u);
    EXPECT_EQ(load_config(dir / kSpecimenName).specimen.record_length, 4096);
    fs::remove_all(dir);
}

TEST(RunExperiment, EmptyTestList) {
    const auto dir = scratch_dir("empty");
    auto cfg = small_config();
    cfg.test_positions.clear();
    const auto manifest = run_experiment(cfg, dir);
    EXPECT_EQ(manifest.size(), 12u);
    EXPECT_EQ(read_manifest(dir).size(), 12u);
    fs::remove_all(dir);
}

TEST(RunExperiment, SameSeedIsByteIdentical) {
    const auto a = scratch_dir("a"), b = scratch_dir("b"), c = scratch_dir("c");
    auto cfg = small_config();
    cfg.prototype_positions = {1000, 2000};
    cfg.test_positions = {1500, 2500};
    run_experiment(cfg, a);
    run_experiment(cfg, b);
    cfg.seed = 2;
    run_experiment(cfg, c);
    for (const auto& e : fs::directory_iterator(a)) {
        const auto name = e.path().filename();
        EXPECT_EQ(io::read_file(e.path()), io::read_file(b / name)) << name;
        if (name.string().rfind("test_", 0) == 0) {
            EXPECT_NE(io::read_file(e.path()), io::read_file(c / name)) << name;
        }
    }
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
}

TEST(RunExperiment, SourcesGetDistinctSeeds) {
    EXPECT_NE(mix_seed(1, 0, 0), mix_seed(1, 0, 1));
    EXPECT_NE(mix_seed(1, 0, 0), mix_seed(1, 1, 0));
    EXPECT_NE(mix_seed(1, 0, 0), mix_seed(2, 0, 0));
}

TEST(RunExperiment, ReportsUnwritableDirectory) {
    EXPECT_THROW(run_experiment(small_config(), "/proc/aeloc_cannot_write_here"), IoError);
}

TEST(Config, ShippedConfigsLoad) {
    const fs::path dir = fs::path(AELOC_SOURCE_DIR) / "configs";
    EXPECT_EQ(config_to_json(load_config(dir / "band_specimen.json")).dump(), config_to_json(ExperimentConfig{}).dump());
    const auto flat = load_config(dir / "nondispersive_noiseless.json");
    EXPECT_EQ(flat.specimen.velocity.min_value(), flat.specimen.velocity.max_value());
    EXPECT_FALSE(flat.specimen.noise_snr_db);
}
