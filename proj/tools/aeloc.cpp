// aeloc: acoustic-emission source locator.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aeloc/aeloc.hpp"

namespace {

using namespace aeloc;
namespace fs = std::filesystem;

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acoustic-emission source locator: learns (delay, position) prototypes from calibration "
                 "signals and locates unknown sources by conditional-average kernel regression."};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic band-specimen dataset");
    std::string sim_config, sim_out;
    sim_cmd->add_option("--config", sim_config, "Experiment configuration (JSON); defaults to the built-in specimen");
    sim_cmd->add_option("-o,--out", sim_out, "Output dataset directory")->required();

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "Sweep bandpass filters over the prototype signals");
    std::string cal_dataset, cal_report, cal_filter_out, cal_svg;
    calibration::BandGrid grid;
    int cal_order = 4, cal_count = 0, cal_max_lag = -1;
    unsigned cal_threads = 0;
    bool cal_no_refine = false;
    cal_cmd->add_option("dataset", cal_dataset, "Dataset directory with manifest.csv")->required();
    cal_cmd->add_option("--report", cal_report, "Calibration report (CSV)")->required();
    cal_cmd->add_option("--filter-out", cal_filter_out, "Write the chosen filter here (default <dataset>/filter.txt)");
    cal_cmd->add_option("--svg", cal_svg, "Delay-versus-position scatter for the best band");
    cal_cmd->add_option("--width", grid.width, "Band width [Hz]")->capture_default_str();
    cal_cmd->add_option("--step", grid.step, "Band shift per repetition [Hz]")->capture_default_str();
    cal_cmd->add_option("--start", grid.f_start, "First band low edge [Hz]")->capture_default_str();
    cal_cmd->add_option("--stop", grid.f_stop, "Upper limit for the band high edge [Hz]")->capture_default_str();
    cal_cmd->add_option("--count", cal_count, "Number of bands (overrides --stop)");
    cal_cmd->add_option("--order", cal_order, "Butterworth order (poles per edge)")->capture_default_str();
    cal_cmd->add_option("--max-lag", cal_max_lag, "Correlation window [samples] (default from specimen.json)");
    cal_cmd->add_option("--threads", cal_threads, "Worker threads (0 = all cores)");
    cal_cmd->add_flag("--no-refine", cal_no_refine, "Integer-sample delays (no parabolic refinement)");

    // learn
    auto* learn_cmd = app.add_subcommand("learn", "Build the prototype database");
    std::string learn_dataset, learn_filter, learn_db;
    std::vector<double> learn_band;
    int learn_order = 4, learn_max_lag = -1;
    bool learn_no_refine = false;
    learn_cmd->add_option("dataset", learn_dataset, "Dataset directory with manifest.csv")->required();
    auto* filter_opt = learn_cmd->add_option("--filter", learn_filter, "Filter file written by calibrate");
    auto* band_opt = learn_cmd->add_option("--band", learn_band, "Band edges LOW HIGH [Hz]")->expected(2);
    filter_opt->excludes(band_opt);
    learn_cmd->add_option("--order", learn_order, "Butterworth order with --band")->capture_default_str();
    learn_cmd->add_option("--db", learn_db, "Output prototype database")->required();
    learn_cmd->add_option("--max-lag", learn_max_lag, "Correlation window [samples] (default from specimen.json)");
    learn_cmd->add_flag("--no-refine", learn_no_refine, "Integer-sample delays");

    // locate
    auto* loc_cmd = app.add_subcommand("locate", "Estimate source positions of signal files");
    std::string loc_db, loc_out;
    std::vector<std::string> loc_files;
    loc_cmd->add_option("database", loc_db, "Prototype database")->required();
    loc_cmd->add_option("files", loc_files, "Two-channel signal files")->required();
    loc_cmd->add_option("-o,--out", loc_out, "Also write the results as CSV");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Locate every test source and compare with ground truth");
    std::string eval_db, eval_dir, eval_report, eval_svg;
    double eval_sep = 0;
    eval_cmd->add_option("database", eval_db, "Prototype database")->required();
    eval_cmd->add_option("tests", eval_dir, "Dataset directory with manifest.csv")->required();
    eval_cmd->add_option("--report", eval_report, "Evaluation report (CSV)")->required();
    eval_cmd->add_option("--svg", eval_svg, "Estimated-versus-actual scatter");
    eval_cmd->add_option("--sensor-separation", eval_sep, "Sensor separation [mm] (default from specimen.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsageError;
    }

    try {
        if (*sim_cmd) {
            const auto manifest = pipeline::cmd_simulate(
                sim_config.empty() ? std::nullopt : std::optional<fs::path>(sim_config), sim_out);
            std::size_t flagged = 0;
            for (const auto& e : manifest) flagged += e.outside_sensor_span;
            std::cout << "wrote " << manifest.size() << " signal files and " << sim::kManifestName << " to " << sim_out
                      << "\n";
            if (flagged) std::cerr << "warning: " << flagged << " source(s) lie outside the sensor span\n";
        } else if (*cal_cmd) {
            pipeline::CalibrateOptions opt;
            opt.dataset = cal_dataset;
            opt.grid = grid;
            if (cal_count > 0) opt.grid.count = cal_count;
            opt.order = cal_order;
            if (cal_max_lag >= 0) opt.max_lag = cal_max_lag;
            opt.refine = !cal_no_refine;
            opt.threads = cal_threads;
            opt.report = cal_report;
            opt.filter_out = cal_filter_out.empty() ? fs::path(cal_dataset) / "filter.txt" : fs::path(cal_filter_out);
            if (!cal_svg.empty()) opt.svg = cal_svg;
            const auto r = pipeline::cmd_calibrate(opt);
            print_warnings(r.warnings);
            std::cout << "best band: " << r.best_band.f_low << "-" << r.best_band.f_high << " Hz (rmse "
                      << r.records[r.best_index].rmse << " mm)\n"
                      << "velocity: " << r.velocity << " km/s\n"
                      << "bands evaluated: " << r.records.size() << ", outliers excluded: " << r.outliers.size()
                      << "\nfilter written to " << opt.filter_out->string() << "\n";
        } else if (*learn_cmd) {
            pipeline::LearnOptions opt;
            opt.dataset = learn_dataset;
            if (!learn_filter.empty())
                opt.filter = calibration::read_filter_spec(learn_filter);
            else if (learn_band.size() == 2)
                opt.filter = {learn_band[0], learn_band[1], learn_order};
            else {
                std::cerr << "learn: pass --filter FILE or --band LOW HIGH\n";
                return kUsageError;
            }
            if (learn_max_lag >= 0) opt.max_lag = learn_max_lag;
            opt.refine = !learn_no_refine;
            opt.database = learn_db;
            const auto out = pipeline::cmd_learn(opt);
            print_warnings(out.warnings);
            std::cout << "stored " << out.locator.prototypes.size() << " prototypes in " << learn_db << "\n";
        } else if (*loc_cmd) {
            std::vector<fs::path> files(loc_files.begin(), loc_files.end());
            const auto results = pipeline::cmd_locate(
                loc_db, files, loc_out.empty() ? std::nullopt : std::optional<fs::path>(loc_out));
            bool failed = false;
            std::cout << pipeline::format_locations(results);
            for (const auto& r : results)
                if (!r.estimate) {
                    std::cerr << "error: " << r.file << ": " << r.error << "\n";
                    failed = true;
                }
            return failed ? kDataError : 0;
        } else if (*eval_cmd) {
            pipeline::EvaluateOptions opt;
            opt.database = eval_db;
            opt.tests = eval_dir;
            opt.report = eval_report;
            if (!eval_svg.empty()) opt.svg = eval_svg;
            if (eval_sep > 0) opt.sensor_separation = eval_sep;
            const auto r = pipeline::cmd_evaluate(opt);
            for (const auto& t : r.tests)
                if (!t.estimate) std::cerr << "error: " << t.file << ": " << t.error << "\n";
            std::printf("tests: %zu (failed %zu)\n", r.tests.size(), r.failed);
            std::printf("average error: %.2f mm (outliers excluded: %.2f mm)\n", r.mean_error, r.mean_error_trimmed);
            std::printf("error range: %.2f - %.2f mm\n", r.min_error, r.max_error);
            std::printf("relative error: %.3f %% of %.0f mm sensor separation\n", 100 * r.relative_error_trimmed,
                        r.sensor_separation);
        }
    } catch (const aeloc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
    return 0;
}
