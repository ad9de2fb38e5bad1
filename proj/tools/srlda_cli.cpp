// srlda command-line driver: simulate, benchmark, fit, predict, surface.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srlda/srlda.hpp"

namespace fs = std::filesystem;
using namespace srlda;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_usage = 2;

/// Input and configuration problems are the caller's to fix.
int exit_code_for(Errc code) {
    switch (code) {
    case Errc::config_error:
    case Errc::parse_error:
    case Errc::dimension_mismatch:
    case Errc::version_mismatch: return exit_usage;
    default: return exit_runtime;
    }
}

struct WriteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::string data;
    std::string out;
    std::string model;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<double> grid_step;
    std::string classifiers;
    std::string classifier = "srlda";
};

class OutputDir {
public:
    explicit OutputDir(fs::path root) : root_(std::move(root)) {}

    void prepare() const {
        std::error_code ec;
        fs::create_directories(root_, ec);
        if (ec || !fs::is_directory(root_)) throw WriteError("cannot create output directory '" + root_.string() + "'");
    }

    /// Only bare file names are accepted, so nothing lands outside the root.
    fs::path write(const std::string& name, const std::string& text) const {
        const fs::path target = root_ / fs::path(name).filename();
        std::ofstream f(target, std::ios::binary | std::ios::trunc);
        if (!f) throw WriteError("cannot write '" + target.string() + "'");
        f << text;
        f.close();
        if (!f) throw WriteError("write failed for '" + target.string() + "'");
        return target;
    }

    const fs::path& root() const { return root_; }

private:
    fs::path root_;
};

OutputDir resolve_output(const Options& o, const RunConfig& cfg) {
    if (!o.out.empty()) return OutputDir(o.out);
    if (const char* env = std::getenv("SRLDA_OUT_DIR"); env && *env) return OutputDir(env);
    if (cfg.out) return OutputDir(*cfg.out);
    return OutputDir("srlda-out");
}

RunConfig load_config(const Options& o) {
    RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.simulation.seed = *o.seed;
        cfg.benchmark.seed = *o.seed;
    }
    if (o.threads) cfg.threads = std::max(1u, *o.threads);
    if (o.grid_step) {
        cfg.fit.grid.step = *o.grid_step;
        cfg.fit.grid.validate();
    }
    if (!o.classifiers.empty()) cfg.classifiers = detail::parse_classifier_list(o.classifiers);
    if (!o.data.empty()) cfg.data_path = o.data;
    return cfg;
}

Dataset load_data(const RunConfig& cfg) {
    if (!cfg.data_path || cfg.data_path->empty()) throw Error(Errc::config_error, "no data file given (--data or [data] path)");
    if (!fs::exists(*cfg.data_path)) throw Error(Errc::config_error, "data file not found: '" + *cfg.data_path + "'");
    return load_labeled_csv(*cfg.data_path, cfg.schema);
}

void write_report(const OutputDir& out, const ExperimentReport& report, const RunConfig& cfg) {
    out.prepare();
    out.write("report.json", report_to_json(report, cfg.resolved()).dump(2) + "\n");
    out.write("report.csv", report_to_csv(report));
    out.write("table.csv", report_to_wide_csv(report));
    std::cout << report_to_text(report);
    for (const auto& r : report.results)
        if (!r.failed.empty())
            std::cerr << "note: " << to_string(r.kind) << " n=" << r.n << " failed in " << r.failed.size()
                      << " repetition(s), first: " << r.failure_messages.front() << "\n";
}

int cmd_simulate(const Options& o) {
    const RunConfig cfg = load_config(o);
    FitConfig fc = cfg.fit;
    if (cfg.fit_pi0_auto) fc.pi0 = cfg.simulation.pi0;
    ExperimentReport all;
    all.protocol = "simulation";
    for (Index n : cfg.simulation_n) {
        SimulationConfig sc = cfg.simulation;
        std::tie(sc.n0, sc.n1) = cfg.simulation_split(n);
        sc.validate();
        ExperimentReport r = run_simulation_benchmark(sc, cfg.classifiers, fc, cfg.threads);
        for (auto& e : r.results) all.results.push_back(std::move(e));
    }
    write_report(resolve_output(o, cfg), all, cfg);
    return exit_ok;
}

int cmd_benchmark(const Options& o) {
    RunConfig cfg = load_config(o);
    const Dataset data = load_data(cfg);
    if (cfg.benchmark.n_values.empty()) throw Error(Errc::config_error, "config [benchmark] n_values: required");
    const ExperimentReport report = run_realdata_benchmark(data, cfg.benchmark, cfg.classifiers, cfg.fit, cfg.threads);
    write_report(resolve_output(o, cfg), report, cfg);
    return exit_ok;
}

int cmd_fit(const Options& o) {
    const RunConfig cfg = load_config(o);
    const Dataset train = load_data(cfg);
    const ClassifierKind kind = parse_classifier_kind(o.classifier);
    const TrainedClassifier model = fit(kind, train, cfg.fit);
    const PredictionReport pr = predict(model, train);
    const OutputDir out = resolve_output(o, cfg);
    out.prepare();
    const fs::path path = out.write("model.json", serialize_model(model));
    for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "classifier " << to_string(kind) << ", p = " << model.dim() << ", n = " << train.size() << "\n";
    std::cout << "training error " << detail::fmt_real(pr.empirical_error) << "\n";
    std::cout << "model written to " << path.string() << "\n";
    return exit_ok;
}

int cmd_predict(const Options& o) {
    const RunConfig cfg = load_config(o);
    if (o.model.empty()) throw Error(Errc::config_error, "--model is required");
    if (!fs::exists(o.model)) throw Error(Errc::config_error, "model file not found: '" + o.model + "'");
    const TrainedClassifier model = load_model(o.model);
    const Dataset data = load_data(cfg);
    const PredictionReport pr = predict(model, data);
    std::string csv = "row,score,label,true_label\n";
    for (std::size_t i = 0; i < pr.scores.size(); ++i)
        csv += std::to_string(i) + "," + detail::fmt_real(pr.scores[i]) + "," + std::to_string(pr.labels[i]) + "," +
               std::to_string(data.labels[i]) + "\n";
    const OutputDir out = resolve_output(o, cfg);
    out.prepare();
    out.write("predictions.csv", csv);
    std::cout << "error " << detail::fmt_real(pr.empirical_error) << " (class 0: " << detail::fmt_real(pr.error0)
              << ", class 1: " << detail::fmt_real(pr.error1) << ")\n";
    return exit_ok;
}

int cmd_surface(const Options& o) {
    const RunConfig cfg = load_config(o);
    SurfaceParams sp;
    if (cfg.surface.from_data) {
        const Dataset train = load_data(cfg);
        const SpectralEstimate est = estimate_surface(train, cfg.fit);
        for (const auto& w : est.warnings) std::cerr << "warning: " << w << "\n";
        sp = est.surface;
    } else {
        sp.spikes = cfg.surface.spikes;
        sp.alpha = cfg.surface.alpha;
        sp.J0 = cfg.surface.J0;
        sp.J1 = cfg.surface.J1;
        sp.pi0 = cfg.surface.pi0;
    }
    try {
        sp.validate();
    } catch (const Error& e) {
        throw Error(Errc::config_error, std::string("surface parameters: ") + e.what());
    }
    GridSpec grid = cfg.fit.grid;
    grid.step = o.grid_step ? *o.grid_step : cfg.surface.step;
    grid.objective = cfg.surface.objective;
    grid.refine = false;
    grid.validate();

    const bool has1 = sp.has_group(SpikeGroup::positive), has2 = sp.has_group(SpikeGroup::negative);
    const auto ax1 = has1 ? grid_axis(grid.step) : std::vector<double>{0.0};
    const auto ax2 = has2 ? grid_axis(grid.step) : std::vector<double>{0.0};
    const OmegaOptimum best = optimize_omega(sp, grid);

    std::string csv = "omega1,omega2,gamma1,gamma2,value,admissible,argmin\n";
    for (double w1 : ax1)
        for (double w2 : ax2) {
            const OmegaPoint w{w1, w2};
            const bool ok = omega_admissible(w, sp, grid.delta);
            const GammaPair g = omega_to_gamma(w, sp);
            const bool is_min = w1 == best.omega.omega1 && w2 == best.omega.omega2;
            csv += detail::fmt_real(w1) + "," + detail::fmt_real(w2) + "," + detail::fmt_real(g.gamma1) + "," +
                   detail::fmt_real(g.gamma2) + "," + (ok ? detail::fmt_real(surface_objective(w, sp, grid.objective)) : "") +
                   "," + (ok ? "1" : "0") + "," + (is_min ? "1" : "0") + "\n";
        }
    const OutputDir out = resolve_output(o, cfg);
    out.prepare();
    out.write("surface.csv", csv);
    std::cout << "argmin omega = (" << best.omega.omega1 << ", " << best.omega.omega2 << "), gamma = (" << best.gamma.gamma1
              << ", " << best.gamma.gamma2 << "), value " << detail::fmt_real(best.value) << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectrally corrected and regularized LDA"};
    app.set_version_flag("--version", std::string(software_version));
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "configuration file");
        sub->add_option("--out", o.out, "output directory (default: $SRLDA_OUT_DIR, [run] out, ./srlda-out)");
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--threads", o.threads, "worker thread cap")->check(CLI::PositiveNumber);
        sub->add_option("--grid-step", o.grid_step, "omega grid spacing");
    };
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo benchmark on the spiked Gaussian population");
    common(simulate);
    simulate->add_option("--classifiers", o.classifiers, "comma list from lda,rlda,srlda,oi-srlda");

    auto* benchmark = app.add_subcommand("benchmark", "repeated stratified splits of a labelled CSV");
    common(benchmark);
    benchmark->add_option("--data", o.data, "labelled CSV");
    benchmark->add_option("--classifiers", o.classifiers, "comma list from lda,rlda,srlda,oi-srlda");

    auto* fit_cmd = app.add_subcommand("fit", "train one classifier and write model.json");
    common(fit_cmd);
    fit_cmd->add_option("--data", o.data, "labelled training CSV");
    fit_cmd->add_option("--classifier", o.classifier, "lda, rlda, srlda or oi-srlda");

    auto* predict_cmd = app.add_subcommand("predict", "score a CSV with a saved model");
    common(predict_cmd);
    predict_cmd->add_option("--data", o.data, "labelled CSV to score");
    predict_cmd->add_option("--model", o.model, "model.json from fit")->required();

    auto* surface = app.add_subcommand("surface", "export the error surface over (omega1, omega2)");
    common(surface);
    surface->add_option("--data", o.data, "training CSV when [surface] source = data");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*simulate) return cmd_simulate(o);
        if (*benchmark) return cmd_benchmark(o);
        if (*fit_cmd) return cmd_fit(o);
        if (*predict_cmd) return cmd_predict(o);
        if (*surface) return cmd_surface(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const WriteError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_usage;
}
