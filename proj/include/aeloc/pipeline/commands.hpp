#pragma once

// The locator's operating modes as library calls. The aeloc tool is a thin
// argument-parsing layer over these functions.

#include <algorithm>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aeloc/calibration/band_sweep.hpp"
#include "aeloc/calibration/report.hpp"
#include "aeloc/grnn/database_io.hpp"
#include "aeloc/pipeline/evaluation.hpp"
#include "aeloc/pipeline/locator.hpp"
#include "aeloc/pipeline/svg.hpp"
#include "aeloc/signal/waveform_io.hpp"
#include "aeloc/simulator/experiment.hpp"

namespace aeloc::pipeline {

namespace fs = std::filesystem;

inline std::optional<sim::ExperimentConfig> load_dataset_config(const fs::path& dir) {
    const auto path = dir / sim::kSpecimenName;
    if (!fs::exists(path)) return std::nullopt;
    return sim::load_config(path);
}

inline int resolve_max_lag(std::optional<int> requested, const std::optional<sim::ExperimentConfig>& cfg) {
    if (requested) return *requested;
    if (cfg) return cfg->specimen.default_max_lag();
    throw InvalidArgument("no specimen.json in the dataset; pass the lag window explicitly (--max-lag)");
}

inline std::vector<calibration::CalibrationSource> load_prototypes(const fs::path& dir) {
    std::vector<calibration::CalibrationSource> out;
    for (const auto& e : sim::filter_role(sim::read_manifest(dir), sim::Role::Prototype))
        out.push_back({e.position, read_waveform_pair(dir / e.file)});
    return out;
}

// ---------------------------------------------------------------- simulate

inline sim::Manifest cmd_simulate(const std::optional<fs::path>& config, const fs::path& out_dir) {
    const auto cfg = config ? sim::load_config(*config) : sim::ExperimentConfig{};
    return sim::run_experiment(cfg, out_dir);
}

// --------------------------------------------------------------- calibrate

struct CalibrateOptions {
    fs::path dataset;
    calibration::BandGrid grid;
    int order = 4;
    std::optional<int> max_lag;
    bool refine = true;
    unsigned threads = 0;
    fs::path report;
    std::optional<fs::path> filter_out;
    std::optional<fs::path> svg;
};

inline std::string calibration_svg(const calibration::CalibrationResult& r,
                                   const std::vector<calibration::CalibrationSource>& sources) {
    Plot plot;
    plot.title = "Delays for band " + io::format_double(r.best_band.f_low * 1e-3) + "-" +
                 io::format_double(r.best_band.f_high * 1e-3) + " kHz";
    plot.x_label = "source position z [mm]";
    plot.y_label = "time delay [ms]";
    Series protos{"prototype source", {}, Marker::Plus, false, "#1f77b4"};
    Series rejected{"rejected outlier", {}, Marker::Circle, false, "#d62728"};
    const auto& delays = r.records[r.best_index].delays;
    double zmin = sources.front().position, zmax = zmin;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const bool out = std::find(r.outliers.begin(), r.outliers.end(), i) != r.outliers.end();
        (out ? rejected : protos).points.emplace_back(sources[i].position, delays[i] * 1e3);
        zmin = std::min(zmin, sources[i].position);
        zmax = std::max(zmax, sources[i].position);
    }
    Series line{"linear fit", {}, Marker::None, true, "#2ca02c"};
    for (double z : {zmin, zmax}) line.points.emplace_back(z, (r.fit.slope * z + r.fit.intercept) * 1e3);
    plot.series = {protos, rejected, line};
    return render_svg(plot);
}

inline calibration::CalibrationResult cmd_calibrate(const CalibrateOptions& opt) {
    const auto cfg = load_dataset_config(opt.dataset);
    const auto sources = load_prototypes(opt.dataset);
    if (sources.size() < 3)
        throw InvalidArgument("calibrate: need at least 3 prototypes, found " + std::to_string(sources.size()));
    calibration::SweepOptions sweep;
    sweep.grid = opt.grid;
    sweep.order = opt.order;
    sweep.max_lag = resolve_max_lag(opt.max_lag, cfg);
    sweep.refine = opt.refine;
    sweep.threads = opt.threads;
    if (cfg) sweep.sensor_separation = cfg->specimen.sensor_separation();
    auto result = calibration::sweep_bands(sources, sweep);

    io::atomic_write(opt.report, calibration::format_report(result));
    if (opt.filter_out) io::atomic_write(*opt.filter_out, calibration::format_filter_spec(result.best_band));
    if (opt.svg) io::atomic_write(*opt.svg, calibration_svg(result, sources));
    return result;
}

// ------------------------------------------------------------------- learn

struct LearnOptions {
    fs::path dataset;
    FilterSpec filter;
    std::optional<int> max_lag;
    bool refine = true;
    fs::path database;
};

struct LearnOutcome {
    Locator locator;
    std::vector<std::string> warnings;
};

inline LearnOutcome cmd_learn(const LearnOptions& opt) {
    const auto cfg = load_dataset_config(opt.dataset);
    const auto entries = sim::filter_role(sim::read_manifest(opt.dataset), sim::Role::Prototype);

    std::vector<std::string> dups;
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (std::size_t j = i + 1; j < entries.size(); ++j)
            if (entries[i].position == entries[j].position)
                dups.push_back(entries[i].file + " and " + entries[j].file + " (" +
                               io::format_double(entries[i].position) + " mm)");
    if (!dups.empty()) {
        std::string msg = "learn: duplicate prototype positions:";
        for (const auto& d : dups) msg += " " + d + ";";
        throw InvalidArgument(msg);
    }

    std::vector<std::string> warnings;
    const int max_lag = resolve_max_lag(opt.max_lag, cfg);
    std::optional<DigitalFilter> filter;
    std::vector<grnn::PrototypeVector> prototypes;
    double sample_rate = 0;
    for (const auto& e : entries) {
        const auto pair = read_waveform_pair(opt.dataset / e.file);
        if (!filter) {
            sample_rate = pair.ch1.sample_rate();
            filter = design_bandpass(opt.filter, sample_rate);
        }
        try {
            const auto d = measure_delay(pair, *filter, max_lag, opt.refine);
            prototypes.push_back({{d.delay}, {e.position}});
        } catch (const DelayWindowExceeded& err) {
            warnings.push_back("skipping prototype " + e.file + ": " + err.what());
        } catch (const NoSignal& err) {
            warnings.push_back("skipping prototype " + e.file + ": " + err.what());
        }
    }
    if (prototypes.size() < 2)
        throw InvalidArgument("learn: only " + std::to_string(prototypes.size()) + " usable prototypes, need at least 2");

    LearnOutcome out{Locator{grnn::PrototypeSet::with_nearest_neighbour_sigmas(std::move(prototypes)), opt.filter,
                             sample_rate, max_lag, opt.refine, std::nullopt},
                     std::move(warnings)};
    if (cfg) out.locator.sensor_separation = cfg->specimen.sensor_separation();
    grnn::write_database(opt.database, to_database(out.locator));
    return out;
}

// ------------------------------------------------------------------ locate

struct LocateResult {
    std::string file;
    std::optional<LocationEstimate> estimate;
    std::string error;
};

inline std::string format_locations(const std::vector<LocateResult>& results) {
    std::string out = "file,position_mm,delay_s,top_weight,effective_support,extrapolated,status\n";
    for (const auto& r : results) {
        if (r.estimate) {
            const auto& e = *r.estimate;
            out += r.file + "," + io::format_double(e.position) + "," + io::format_double(e.delay) + "," +
                   io::format_double(e.top_weight) + "," + std::to_string(e.effective_support) + "," +
                   (e.extrapolated ? "1" : "0") + ",ok\n";
        } else {
            out += r.file + ",nan,nan,nan,0,0,failed\n";
        }
    }
    return out;
}

/// Locates each file independently; a failure on one file does not stop the others.
inline std::vector<LocateResult> cmd_locate(const fs::path& database, const std::vector<fs::path>& files,
                                            const std::optional<fs::path>& out = std::nullopt) {
    const auto loc = read_locator(database);
    std::vector<LocateResult> results;
    for (const auto& f : files) {
        LocateResult r{f.string(), std::nullopt, {}};
        try {
            r.estimate = locate(loc, read_waveform_pair(f));
        } catch (const Error& e) {
            r.error = e.what();
        }
        results.push_back(std::move(r));
    }
    if (out) io::atomic_write(*out, format_locations(results));
    return results;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
    fs::path database;
    fs::path tests;
    fs::path report;
    std::optional<fs::path> svg;
    std::optional<double> sensor_separation;
};

inline std::string evaluation_svg(const EvaluationReport& r, const Locator& loc) {
    Plot plot;
    plot.title = "Estimated versus actual source position";
    plot.x_label = "actual position z [mm]";
    plot.y_label = "estimated position [mm]";
    Series protos{"prototype source", {}, Marker::Plus, false, "#1f77b4"};
    for (const auto& p : loc.prototypes.prototypes()) protos.points.emplace_back(p.hidden[0], p.hidden[0]);
    Series tests{"test source", {}, Marker::Circle, false, "#d62728"};
    double lo = protos.points.front().first, hi = lo;
    for (const auto& t : r.tests) {
        if (t.estimate) tests.points.emplace_back(t.true_position, t.estimate->position);
        lo = std::min(lo, t.true_position);
        hi = std::max(hi, t.true_position);
    }
    for (const auto& p : protos.points) lo = std::min(lo, p.first), hi = std::max(hi, p.first);
    Series diag{"ideal", {{lo, lo}, {hi, hi}}, Marker::None, true, "#7f7f7f"};
    plot.series = {diag, protos, tests};
    return render_svg(plot);
}

inline EvaluationReport cmd_evaluate(const EvaluateOptions& opt) {
    const auto loc = read_locator(opt.database);
    const auto manifest = sim::read_manifest(opt.tests);
    const auto entries = sim::filter_role(manifest, sim::Role::Test);

    std::vector<std::string> orphans;
    std::set<std::string> listed;
    for (const auto& e : manifest) {
        listed.insert(e.file);
        if (!fs::exists(opt.tests / e.file)) orphans.push_back(e.file + " (listed in manifest, file missing)");
    }
    std::vector<fs::path> on_disk;
    for (const auto& de : fs::directory_iterator(opt.tests))
        if (de.is_regular_file() && de.path().extension() == ".csv") on_disk.push_back(de.path());
    std::sort(on_disk.begin(), on_disk.end());
    for (const auto& p : on_disk)
        if (!listed.count(p.filename().string()) && looks_like_waveform_file(p))
            orphans.push_back(p.filename().string() + " (waveform not in manifest)");
    if (!orphans.empty()) {
        std::string msg = "evaluate: manifest and signal files disagree:";
        for (const auto& o : orphans) msg += "\n  " + o;
        throw IoError(msg);
    }
    if (entries.empty()) throw InvalidArgument("evaluate: manifest lists no test sources");

    double separation = 0;
    if (opt.sensor_separation)
        separation = *opt.sensor_separation;
    else if (const auto cfg = load_dataset_config(opt.tests))
        separation = cfg->specimen.sensor_separation();
    else if (loc.sensor_separation)
        separation = *loc.sensor_separation;
    else
        throw InvalidArgument("evaluate: sensor separation unknown; pass --sensor-separation");

    std::vector<TestOutcome> outcomes;
    for (const auto& e : entries) {
        TestOutcome t;
        t.file = e.file;
        t.true_position = e.position;
        try {
            t.estimate = locate(loc, read_waveform_pair(opt.tests / e.file));
        } catch (const Error& err) {
            t.error = err.what();
        }
        outcomes.push_back(std::move(t));
    }
    auto report = summarize(std::move(outcomes), separation);
    io::atomic_write(opt.report, format_evaluation(report));
    if (opt.svg) io::atomic_write(*opt.svg, evaluation_svg(report, loc));
    return report;
}

} // namespace aeloc::pipeline
