// csgesture: command-line front end for dataset synthesis, extraction,
// training, evaluation, offline streaming, the M sweep and the WebSocket server.

#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "csgesture/error.hpp"
#include "csgesture/pipeline.hpp"
#include "csgesture/server.hpp"
#include "csgesture/stream.hpp"
#include "csgesture/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string model_path;
};

csg::PipelineConfig resolve_config(const Globals& g) {
    csg::PipelineConfig cfg;
    if (!g.config_path.empty()) cfg = csg::load_config(g.config_path);
    if (g.seed) {
        cfg.phi_seed = *g.seed;
        cfg.kmeans_seed = *g.seed;
    }
    cfg.validate();
    return cfg;
}

std::string need_model(const Globals& g) {
    if (g.model_path.empty()) throw CLI::ValidationError("--model", "a model path is required");
    return g.model_path;
}

std::string frame_name(std::size_t i) {
    std::ostringstream s;
    s << std::setw(4) << std::setfill('0') << i << ".pgm";
    return s.str();
}

void write_sample(const fs::path& dir, const csg::SyntheticSample& sample, const csg::PipelineConfig& cfg,
                  std::size_t rect_pixels) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < sample.frames.size(); ++i) csg::write_pgm(dir / frame_name(i), sample.frames[i]);
    csg::write_truth(dir / "truth.txt", sample.truth, cfg.block, rect_pixels);
}

int cmd_synth(const Globals& g, const fs::path& out, std::size_t n_train, std::size_t n_test, std::size_t n_unspecified,
              std::size_t quiet_frames) {
    const auto cfg = resolve_config(g);
    const std::uint64_t seed = g.seed.value_or(2016);
    csg::DatasetOptions opts;
    opts.width = cfg.frame_width;
    opts.height = cfg.frame_height;

    std::vector<csg::ManifestEntry> entries;
    std::size_t index = 0;
    for (auto cls : csg::kAllGestureClasses) {
        const std::string label(csg::label_of(cls));
        const std::string dir_label = cls == csg::GestureClass::Plus ? "plus" : label;
        for (std::size_t i = 0; i < n_train + n_test; ++i) {
            auto sample = csg::make_gesture_sample(cls, index++, seed, opts);
            // pad with still frames so the directory also works as a stream
            for (std::size_t q = 0; q < quiet_frames; ++q) sample.frames.push_back(sample.frames.back());
            const std::string split = i < n_train ? "train" : "test";
            const fs::path rel = fs::path(split) / (dir_label + "_" + std::to_string(i));
            write_sample(out / rel, sample, cfg, opts.render.rect_pixels);
            entries.push_back({label, split, rel});
        }
    }
    for (std::size_t i = 0; i < n_unspecified; ++i) {
        const auto sample = csg::make_unspecified_sample(i, seed, opts);
        const fs::path rel = fs::path("unspecified") / ("walk_" + std::to_string(i));
        write_sample(out / rel, sample, cfg, opts.render.rect_pixels);
        entries.push_back({"?", "unspecified", rel});
    }
    csg::write_manifest(out / "manifest.txt", entries);
    std::ofstream(out / "config.txt") << csg::to_config_text(cfg);
    std::cout << "wrote " << entries.size() << " samples to " << out.string() << "\n";
    return 0;
}

int cmd_extract(const Globals& g, const fs::path& frames, const fs::path& out) {
    const auto cfg = resolve_config(g);
    const csg::Extractor extractor(cfg);
    const auto seq = csg::extract_sequence(csg::load_frame_sequence(frames), extractor);
    if (out.empty()) {
        std::cout << "# frame_index x y r score\n" << std::setprecision(17);
        for (const auto& c : seq.centers)
            std::cout << c.frame_index << ' ' << c.normalized.x << ' ' << c.normalized.y << ' ' << c.center.r << ' '
                      << c.center.score << '\n';
    } else {
        csg::write_centers(out, seq);
        std::cerr << seq.centers.size() << " centers written to " << out.string() << "\n";
    }
    return 0;
}

int cmd_train(const Globals& g, const fs::path& manifest, const std::string& split) {
    const auto cfg = resolve_config(g);
    const csg::Extractor extractor(cfg);
    const auto entries = csg::read_manifest(manifest);
    std::size_t skipped = 0;
    const auto data = csg::load_split(entries, split, extractor, &skipped);
    if (skipped) std::cerr << "skipped " << skipped << " samples without motion\n";
    const auto model = csg::train(data, cfg);
    csg::save_model(model, need_model(g));
    std::cerr << "trained on " << data.size() << " samples, " << model.labels.size() << " classes, tau = " << model.tau()
              << "\n";
    return 0;
}

int cmd_eval(const Globals& g, const fs::path& manifest, const std::string& split, const std::string& unspecified_split,
             const fs::path& report_json) {
    const auto model = csg::load_model(need_model(g));
    const csg::Extractor extractor(model.config);
    const auto entries = csg::read_manifest(manifest);
    const auto test = csg::load_split(entries, split, extractor);
    std::vector<csg::CenterSeq> unspecified;
    for (auto& s : csg::load_split(entries, unspecified_split, extractor)) unspecified.push_back(std::move(s.points));
    const auto report = csg::evaluate(model, test, unspecified);
    std::cout << report.table();
    if (!report_json.empty()) std::ofstream(report_json) << report.to_json().dump(2) << "\n";
    return 0;
}

int cmd_run(const Globals& g, const fs::path& frames, bool centers) {
    const auto model = csg::load_model(need_model(g));
    const csg::Extractor extractor(model.config);
    csg::run_stream(csg::directory_source(frames), model, extractor, [&](const csg::StreamRecognizer::Step& step) {
        const auto seq = static_cast<std::int64_t>(step.frame);
        if (centers && step.center) std::cout << csg::center_message(seq, *step.center, *step.normalized).dump() << "\n";
        if (step.event) std::cout << csg::event_message(seq, *step.event).dump() << "\n";
    });
    return 0;
}

int cmd_sweep(const Globals& g, const std::vector<std::size_t>& ms, std::size_t trials, double noise, const fs::path& out) {
    csg::SweepOptions opts;
    if (!ms.empty()) opts.measurements = ms;
    opts.trials = trials;
    opts.noise_sigma = noise;
    if (g.seed) opts.seed = *g.seed;
    const auto csv = csg::sweep_csv(csg::sweep_measurements(opts));
    if (out.empty()) {
        std::cout << csv;
    } else {
        std::ofstream(out) << csv;
    }
    return 0;
}

volatile std::sig_atomic_t g_interrupted = 0;

int cmd_serve(const Globals& g, const std::string& address, std::uint16_t port) {
    const auto model = csg::load_model(need_model(g));
    csg::WsServer server(model, address, port);
    server.start();
    std::signal(SIGINT, [](int) { g_interrupted = 1; });
    std::signal(SIGTERM, [](int) { g_interrupted = 1; });
    std::cerr << "listening on ws://" << address << ":" << server.port() << "\n";
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    server.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressed-domain gesture recognition toolkit"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--config", g.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "seed for the code matrix and clustering (dataset seed for synth)");
    app.add_option("--model", g.model_path, "model file");

    auto* synth = app.add_subcommand("synth", "generate a labeled synthetic dataset");
    fs::path synth_out;
    std::size_t n_train = 10, n_test = 5, n_unspecified = 10, quiet = 8;
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--train", n_train, "training samples per class");
    synth->add_option("--test", n_test, "test samples per class");
    synth->add_option("--unspecified", n_unspecified, "random-walk samples");
    synth->add_option("--quiet-frames", quiet, "still frames appended to each gesture");

    auto* extract = app.add_subcommand("extract", "frame directory -> centers file");
    fs::path extract_frames, extract_out;
    extract->add_option("--frames", extract_frames, "directory of PGM frames")->required()->check(CLI::ExistingDirectory);
    extract->add_option("--out", extract_out, "centers file (stdout if omitted)");

    auto* train = app.add_subcommand("train", "train a model from a dataset manifest");
    fs::path train_manifest;
    std::string train_split = "train";
    train->add_option("--dataset", train_manifest, "manifest file")->required()->check(CLI::ExistingFile);
    train->add_option("--split", train_split, "manifest split to train on");

    auto* eval = app.add_subcommand("eval", "recognition and false-detection report");
    fs::path eval_manifest, eval_json;
    std::string eval_split = "test", eval_unspecified = "unspecified";
    eval->add_option("--dataset", eval_manifest, "manifest file")->required()->check(CLI::ExistingFile);
    eval->add_option("--split", eval_split, "split with labeled test samples");
    eval->add_option("--unspecified-split", eval_unspecified, "split with unspecified gestures");
    eval->add_option("--report", eval_json, "also write the report as JSON");

    auto* run = app.add_subcommand("run", "stream a frame directory through the recognizer");
    fs::path run_frames;
    bool run_centers = false;
    run->add_option("--frames", run_frames, "directory of PGM frames")->required()->check(CLI::ExistingDirectory);
    run->add_flag("--centers", run_centers, "also print per-frame center messages");

    auto* sweep = app.add_subcommand("sweep-m", "center error versus number of measurements (CSV)");
    std::vector<std::size_t> sweep_ms;
    std::size_t sweep_trials = 5;
    double sweep_noise = csg::SweepOptions{}.noise_sigma;
    fs::path sweep_out;
    sweep->add_option("--ms", sweep_ms, "measurement counts")->delimiter(',');
    sweep->add_option("--trials", sweep_trials, "gestures (and code matrices) per M");
    sweep->add_option("--noise", sweep_noise, "per-pixel sensor noise sigma");
    sweep->add_option("--out", sweep_out, "CSV file (stdout if omitted)");

    auto* serve = app.add_subcommand("serve", "WebSocket recognition service");
    std::string address = "127.0.0.1";
    std::uint16_t port = 8765;
    serve->add_option("--address", address, "bind address");
    serve->add_option("--port", port, "TCP port (0 picks a free one)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return cmd_synth(g, synth_out, n_train, n_test, n_unspecified, quiet);
        if (*extract) return cmd_extract(g, extract_frames, extract_out);
        if (*train) return cmd_train(g, train_manifest, train_split);
        if (*eval) return cmd_eval(g, eval_manifest, eval_split, eval_unspecified, eval_json);
        if (*run) return cmd_run(g, run_frames, run_centers);
        if (*sweep) return cmd_sweep(g, sweep_ms, sweep_trials, sweep_noise, sweep_out);
        if (*serve) return cmd_serve(g, address, port);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
