#include "csgesture/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "csgesture/error.hpp"
#include "csgesture/rng.hpp"
#include "csgesture/synth.hpp"

namespace csg {

Extractor::Extractor(const PipelineConfig& cfg)
    : cfg_((cfg.validate(), cfg)), bank_(cfg.grid_w(), cfg.grid_h(), cfg.template_sizes) {
    if (cfg_.measurements > 0) {
        phi_.emplace(make_phi(cfg_.measurements, cfg_.cells(), cfg_.phi_seed));
        cbank_.emplace(compress_bank(bank_, *phi_));
    }
}

std::optional<MotionCenter> Extractor::process(const BlockVector& y) const {
    if (!phi_) return extract_center(y, bank_, cfg_.activity_threshold_value());
    const auto yhat = project(*phi_, y);
    return extract_center_compressed(yhat, *cbank_, bank_, cfg_.compressed_threshold_value());
}

std::optional<MotionCenter> Extractor::process(const Frame& prev, const Frame& next) const {
    if (prev.width != cfg_.frame_width || prev.height != cfg_.frame_height)
        fail(ErrorCode::DimensionMismatch, "frame is " + std::to_string(prev.width) + "x" + std::to_string(prev.height) +
                                               ", configuration expects " + std::to_string(cfg_.frame_width) + "x" +
                                               std::to_string(cfg_.frame_height));
    return process(block_average_diff(prev, next, cfg_.block));
}

Point2 Extractor::normalize(const MotionCenter& c) const {
    return {c.x / static_cast<double>(cfg_.grid_w()), c.y / static_cast<double>(cfg_.grid_h())};
}

CenterSeq ExtractedSequence::points() const {
    CenterSeq out;
    out.reserve(centers.size());
    for (const auto& c : centers) out.push_back(c.normalized);
    return out;
}

ExtractedSequence extract_sequence(const std::vector<Frame>& frames, const Extractor& extractor) {
    if (frames.size() < 2) fail(ErrorCode::InsufficientFrames, "extract_sequence: need at least 2 frames");
    ExtractedSequence out;
    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
        if (auto c = extractor.process(frames[i], frames[i + 1]))
            out.centers.push_back({i, *c, extractor.normalize(*c)});
    }
    if (out.centers.empty()) fail(ErrorCode::EmptySequence, "no motion detected in any frame");
    return out;
}

void write_centers(const std::filesystem::path& path, const ExtractedSequence& seq) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    out << "# frame_index x y r score\n" << std::setprecision(17);
    for (const auto& c : seq.centers)
        out << c.frame_index << ' ' << c.normalized.x << ' ' << c.normalized.y << ' ' << c.center.r << ' '
            << c.center.score << '\n';
}

CenterSeq read_centers(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    CenterSeq out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::size_t index = 0, r = 0;
        double x = 0, y = 0, score = 0;
        if (!(ls >> index >> x >> y >> r >> score))
            fail(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": expected 'frame_index x y r score'");
        out.push_back({x, y});
    }
    if (out.empty()) fail(ErrorCode::EmptySequence, "no centers in " + path.string());
    return out;
}

GestureModel train(const std::vector<LabeledSequence>& dataset, PipelineConfig cfg) {
    cfg.validate();
    if (dataset.empty()) fail(ErrorCode::ConfigError, "train: empty dataset");

    GestureModel model;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<const CenterSeq*>> by_class;
    for (const auto& s : dataset) {
        if (s.points.empty()) fail(ErrorCode::EmptySequence, "train: empty sequence for class '" + s.label + "'");
        auto [it, inserted] = index.emplace(s.label, model.labels.size());
        if (inserted) {
            model.labels.push_back(s.label);
            by_class.emplace_back();
        }
        by_class[it->second].push_back(&s.points);
    }

    if (!cfg.tau) {
        double total = 0;
        for (const auto& s : dataset) total += static_cast<double>(s.points.size());
        cfg.tau = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(total / static_cast<double>(dataset.size()))));
    }
    cfg.validate();
    const std::size_t tau = *cfg.tau;

    const std::size_t min_per_class = std::max(cfg.clusters_per_class, cfg.pca_dims + 1);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        if (by_class[c].size() < min_per_class)
            fail(ErrorCode::ConfigError, "train: class '" + model.labels[c] + "' has " + std::to_string(by_class[c].size()) +
                                             " samples, needs " + std::to_string(min_per_class));
    }

    for (std::size_t c = 0; c < by_class.size(); ++c) {
        std::vector<CenterSeq> samples;
        for (const auto* s : by_class[c]) samples.push_back(*s);
        KMeansOptions opts;
        opts.max_iter = cfg.kmeans_max_iter;
        opts.seed = mix_seed(cfg.kmeans_seed, c);
        opts.dba = {cfg.dba_max_iter, cfg.dba_tol};
        auto km = kmeans_dtw(samples, cfg.clusters_per_class, tau, opts);
        for (std::size_t k = 0; k < km.centers.size(); ++k)
            model.supers.push_back({std::move(km.centers[k]), model.labels[c], k});
    }

    std::vector<FeatureVector> features;
    features.reserve(dataset.size());
    for (const auto& s : dataset) features.push_back(vectorize(rescale(s.points, model.supers, false).points, tau));
    model.pca = pca_fit(features, cfg.pca_dims);

    std::vector<LabeledPoints> embedded(model.labels.size());
    for (std::size_t c = 0; c < model.labels.size(); ++c) embedded[c].label = model.labels[c];
    for (std::size_t i = 0; i < dataset.size(); ++i)
        embedded[index.at(dataset[i].label)].points.push_back(pca_project(model.pca, features[i]));
    model.gaussians = gaussian_fit(embedded);
    model.config = cfg;
    return model;
}

Recognition recognize(const GestureModel& model, const CenterSeq& seq, bool open_ended) {
    Recognition r;
    r.rescaled = rescale(seq, model.supers, open_ended);
    r.embedding = pca_project(model.pca, vectorize(r.rescaled.points, model.tau()));
    r.verdict = classify(model.gaussians, r.embedding, model.config.chi2_threshold);
    return r;
}

double Report::overall_recognition() const {
    std::size_t correct = 0, total = 0;
    for (std::size_t c = 0; c < labels.size(); ++c) {
        correct += confusion[c][c];
        total += totals[c];
    }
    return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

namespace {

std::string percent(const std::optional<double>& v) {
    if (!v) return "n/a";
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << 100.0 * *v << '%';
    return s.str();
}

}  // namespace

std::string Report::table() const {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Gesture Type"});
    rows.push_back({"Recognition Rate"});
    rows.push_back({"False Detection Rate"});
    for (std::size_t c = 0; c < labels.size(); ++c) {
        rows[0].push_back(labels[c]);
        rows[1].push_back(percent(recognition_rate[c]));
        rows[2].push_back(percent(false_detection_by_class[c]));
    }
    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& row : rows)
        for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());

    std::ostringstream out;
    for (const auto& row : rows) {
        out << '|';
        for (std::size_t k = 0; k < row.size(); ++k) out << ' ' << std::setw(static_cast<int>(width[k])) << row[k] << " |";
        out << '\n';
    }
    out << "overall recognition: " << percent(overall_recognition()) << '\n';
    out << "unspecified gestures: " << unspecified_count << ", false detection: " << percent(false_detection_rate) << '\n';
    return out.str();
}

nlohmann::json Report::to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["labels"] = labels;
    j["confusion"] = confusion;
    j["totals"] = totals;
    j["rejections"] = rejections;
    j["recognition_rate"] = nlohmann::json::array();
    j["false_detection_by_class"] = nlohmann::json::array();
    for (std::size_t c = 0; c < labels.size(); ++c) {
        j["recognition_rate"].push_back(opt(recognition_rate[c]));
        j["false_detection_by_class"].push_back(opt(false_detection_by_class[c]));
    }
    j["overall_recognition"] = overall_recognition();
    j["unspecified_count"] = unspecified_count;
    j["false_detection_rate"] = opt(false_detection_rate);
    return j;
}

Report evaluate(const GestureModel& model, const std::vector<LabeledSequence>& test,
                const std::vector<CenterSeq>& unspecified) {
    if (test.empty()) fail(ErrorCode::ConfigError, "evaluate: empty test set");
    const std::size_t k = model.labels.size();
    Report rep;
    rep.labels = model.labels;
    rep.confusion.assign(k, std::vector<std::size_t>(k + 1, 0));
    rep.totals.assign(k, 0);
    rep.rejections.assign(k, 0);

    for (const auto& s : test) {
        const auto it = std::find(model.labels.begin(), model.labels.end(), s.label);
        if (it == model.labels.end()) fail(ErrorCode::UnknownLabel, "evaluate: label '" + s.label + "' is not in the model");
        const auto truth = static_cast<std::size_t>(it - model.labels.begin());
        const auto v = recognize(model, s.points, false).verdict;
        ++rep.totals[truth];
        if (v.accepted) {
            ++rep.confusion[truth][v.class_index];
        } else {
            ++rep.confusion[truth][k];
            ++rep.rejections[truth];
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        rep.recognition_rate.push_back(rep.totals[c] ? std::optional(static_cast<double>(rep.confusion[c][c]) /
                                                                     static_cast<double>(rep.totals[c]))
                                                     : std::nullopt);
    }

    rep.unspecified_count = unspecified.size();
    rep.false_detection_by_class.assign(k, std::nullopt);
    if (!unspecified.empty()) {
        std::vector<std::size_t> detected(k, 0);
        std::size_t any = 0;
        for (const auto& s : unspecified) {
            const auto v = recognize(model, s, false).verdict;
            if (v.accepted) {
                ++detected[v.class_index];
                ++any;
            }
        }
        const auto n = static_cast<double>(unspecified.size());
        rep.false_detection_rate = static_cast<double>(any) / n;
        for (std::size_t c = 0; c < k; ++c) rep.false_detection_by_class[c] = static_cast<double>(detected[c]) / n;
    }
    return rep;
}

namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json mat_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
    return rows;
}

Eigen::VectorXd json_vec(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd json_mat(const nlohmann::json& j, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto row = json_vec(j[i]);
        if (row.size() != cols) fail(ErrorCode::ParseError, "model: ragged matrix");
        m.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return m;
}

}  // namespace

nlohmann::json model_to_json(const GestureModel& model) {
    nlohmann::json j;
    j["format"] = "csgesture-model";
    j["version"] = model.version;
    j["config"] = to_json(model.config);
    j["labels"] = model.labels;
    j["super_samples"] = nlohmann::json::array();
    for (const auto& s : model.supers) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : s.points) pts.push_back({p.x, p.y});
        j["super_samples"].push_back({{"label", s.label}, {"cluster", s.cluster}, {"points", pts}});
    }
    j["pca"] = {{"mean", vec_json(model.pca.mean)},
                {"components", mat_json(model.pca.components)},
                {"eigenvalues", vec_json(model.pca.eigenvalues)}};
    j["gaussians"] = nlohmann::json::array();
    for (const auto& g : model.gaussians)
        j["gaussians"].push_back({{"label", g.label}, {"mean", vec_json(g.mean)}, {"covariance", mat_json(g.covariance)}});
    return j;
}

GestureModel model_from_json(const nlohmann::json& j) {
    GestureModel m;
    try {
        if (j.at("format").get<std::string>() != "csgesture-model") fail(ErrorCode::ParseError, "not a gesture model");
        m.version = j.at("version").get<int>();
        if (m.version != kModelFormatVersion)
            fail(ErrorCode::VersionError, "model format version " + std::to_string(m.version) + " is not supported (expected " +
                                              std::to_string(kModelFormatVersion) + ")");
        m.config = config_from_json(j.at("config"));
        if (!m.config.tau) fail(ErrorCode::ParseError, "model: tau is not resolved");
        m.labels = j.at("labels").get<std::vector<std::string>>();
        for (const auto& s : j.at("super_samples")) {
            SuperSample ss;
            ss.label = s.at("label").get<std::string>();
            ss.cluster = s.at("cluster").get<std::size_t>();
            for (const auto& p : s.at("points")) ss.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            if (ss.points.size() != *m.config.tau) fail(ErrorCode::ParseError, "model: super sample length differs from tau");
            m.supers.push_back(std::move(ss));
        }
        const auto& pca = j.at("pca");
        m.pca.mean = json_vec(pca.at("mean"));
        m.pca.components = json_mat(pca.at("components"), m.pca.mean.size());
        m.pca.eigenvalues = json_vec(pca.at("eigenvalues"));
        if (m.pca.mean.size() != static_cast<Eigen::Index>(2 * *m.config.tau))
            fail(ErrorCode::ParseError, "model: PCA input dimension differs from 2*tau");
        for (const auto& g : j.at("gaussians")) {
            auto mean = json_vec(g.at("mean"));
            auto cov = json_mat(g.at("covariance"), mean.size());
            m.gaussians.push_back(make_gaussian(g.at("label").get<std::string>(), std::move(mean), std::move(cov)));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("model: ") + e.what());
    }
    if (m.labels.empty() || m.gaussians.size() != m.labels.size() || m.supers.empty())
        fail(ErrorCode::ParseError, "model: inconsistent class tables");
    return m;
}

std::string serialize_model(const GestureModel& model) { return model_to_json(model).dump(1) + "\n"; }

GestureModel deserialize_model(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("model: ") + e.what());
    }
    return model_from_json(j);
}

void save_model(const GestureModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    out << serialize_model(model);
    if (!out) fail(ErrorCode::IoError, "write failed: " + path.string());
}

GestureModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return deserialize_model(ss.str());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) fail(ErrorCode::IoError, "cannot open manifest " + manifest.string());
    const auto root = manifest.parent_path();
    std::vector<ManifestEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        ManifestEntry e;
        std::string rel;
        if (!(ls >> e.label >> e.split >> rel))
            fail(ErrorCode::ParseError, manifest.string() + ":" + std::to_string(lineno) + ": expected 'label split path'");
        e.path = std::filesystem::path(rel).is_absolute() ? std::filesystem::path(rel) : root / rel;
        out.push_back(std::move(e));
    }
    return out;
}

void write_manifest(const std::filesystem::path& manifest, const std::vector<ManifestEntry>& entries) {
    std::ofstream out(manifest);
    if (!out) fail(ErrorCode::IoError, "cannot write " + manifest.string());
    out << "# label split path\n";
    for (const auto& e : entries) out << e.label << ' ' << e.split << ' ' << e.path.generic_string() << '\n';
}

std::vector<LabeledSequence> load_split(const std::vector<ManifestEntry>& entries, const std::string& split,
                                        const Extractor& extractor, std::size_t* skipped) {
    std::vector<LabeledSequence> out;
    std::size_t dropped = 0;
    for (const auto& e : entries) {
        if (e.split != split) continue;
        try {
            if (std::filesystem::is_directory(e.path)) {
                out.push_back({e.label, extract_sequence(load_frame_sequence(e.path), extractor).points()});
            } else {
                out.push_back({e.label, read_centers(e.path)});
            }
        } catch (const Error& err) {
            if (err.code() != ErrorCode::EmptySequence) throw;
            ++dropped;
        }
    }
    if (skipped) *skipped = dropped;
    return out;
}

std::vector<SweepRow> sweep_measurements(const SweepOptions& opts) {
    PipelineConfig base;
    base.frame_width = opts.width;
    base.frame_height = opts.height;
    base.block = opts.block;
    base.template_sizes = opts.template_sizes;
    base.measurements = 0;
    const Extractor uncompressed(base);
    const auto& bank = uncompressed.bank();
    const double diagonal = std::hypot(static_cast<double>(base.grid_w()), static_cast<double>(base.grid_h()));

    struct Trial {
        std::vector<BlockVector> blocks;
        std::vector<std::optional<MotionCenter>> reference;
        std::vector<Point2> truth;
    };
    std::vector<Trial> trials;
    for (std::size_t t = 0; t < opts.trials; ++t) {
        GestureSpec spec{GestureClass::Z, opts.duration, opts.amplitude, opts.jitter_sigma, mix_seed(opts.seed, t)};
        const auto truth = gen_trajectory(spec, opts.width, opts.height);
        RenderOptions render;
        render.rect_pixels = opts.rect_pixels;
        render.noise_sigma = opts.noise_sigma;
        render.noise_seed = mix_seed(opts.seed, 1000 + t);
        const auto frames = render_frames(truth, opts.width, opts.height, render);

        Trial trial;
        trial.truth = truth_in_blocks(truth, opts.block);
        for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
            trial.blocks.push_back(block_average_diff(frames[i], frames[i + 1], opts.block));
            trial.reference.push_back(uncompressed.process(trial.blocks.back()));
        }
        trials.push_back(std::move(trial));
    }

    std::vector<SweepRow> rows;
    for (const auto m : opts.measurements) {
        SweepRow row;
        row.measurements = m;
        double err = 0.0, truth_err = 0.0;
        std::size_t agree = 0;
        for (std::size_t t = 0; t < trials.size(); ++t) {
            const auto phi = make_phi(m, bank.cells(), mix_seed(opts.seed, 2000 + t * 1000 + m));
            const auto cbank = compress_bank(bank, phi);
            const double gate = default_compressed_threshold(base.activity_threshold_value(), m);
            const auto& trial = trials[t];
            for (std::size_t i = 0; i < trial.blocks.size(); ++i) {
                if (!trial.reference[i]) continue;
                ++row.frames;
                const auto c = extract_center_compressed(project(phi, trial.blocks[i]), cbank, bank, gate);
                if (!c) {
                    ++row.missed;
                    err += diagonal;
                    truth_err += diagonal;
                    continue;
                }
                const auto& ref = *trial.reference[i];
                err += std::hypot(c->x - ref.x, c->y - ref.y);
                truth_err += std::hypot(c->x - trial.truth[i].x, c->y - trial.truth[i].y);
                if (c->index == ref.index) ++agree;
            }
        }
        if (row.frames > 0) {
            const auto n = static_cast<double>(row.frames);
            row.mean_error = err / n;
            row.truth_error = truth_err / n;
            row.agreement = static_cast<double>(agree) / n;
        }
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "M,mean_error_blocks,truth_error_blocks,agreement,missed,frames\n" << std::setprecision(6);
    for (const auto& r : rows)
        out << r.measurements << ',' << r.mean_error << ',' << r.truth_error << ',' << r.agreement << ',' << r.missed << ','
            << r.frames << '\n';
    return out.str();
}

}  // namespace csg
