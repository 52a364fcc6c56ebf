#pragma once

// Training, offline recognition, evaluation and persistence built on the
// sensing / motion / tseries / classify modules.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csgesture/classify.hpp"
#include "csgesture/config.hpp"
#include "csgesture/motion.hpp"
#include "csgesture/sensing.hpp"
#include "csgesture/tseries.hpp"

namespace csg {

/// Sensing state for one configuration: template bank, code matrix and compressed bank.
/// Immutable once built; share it between streams.
class Extractor {
public:
    explicit Extractor(const PipelineConfig& cfg);

    const PipelineConfig& config() const { return cfg_; }
    const TemplateBank& bank() const { return bank_; }
    bool compressed() const { return phi_.has_value(); }
    const CodeMatrix& phi() const { return *phi_; }
    const CompressedBank& compressed_bank() const { return *cbank_; }

    std::optional<MotionCenter> process(const BlockVector& y) const;
    std::optional<MotionCenter> process(const Frame& prev, const Frame& next) const;

    /// Block coordinates -> [0, 1]^2.
    Point2 normalize(const MotionCenter& c) const;

private:
    PipelineConfig cfg_;
    TemplateBank bank_;
    std::optional<CodeMatrix> phi_;
    std::optional<CompressedBank> cbank_;
};

struct ExtractedCenter {
    std::size_t frame_index = 0;  // index of the difference image
    MotionCenter center;
    Point2 normalized;
};

struct ExtractedSequence {
    std::vector<ExtractedCenter> centers;

    CenterSeq points() const;
};

/// Runs the acquisition chain over consecutive frame pairs, dropping NoMotion frames.
/// Throws EmptySequence when no frame shows motion.
ExtractedSequence extract_sequence(const std::vector<Frame>& frames, const Extractor& extractor);

/// "frame_index x y r score" per line; x and y normalized.
void write_centers(const std::filesystem::path& path, const ExtractedSequence& seq);
CenterSeq read_centers(const std::filesystem::path& path);

struct LabeledSequence {
    std::string label;
    CenterSeq points;
};

inline constexpr int kModelFormatVersion = 1;

struct GestureModel {
    int version = kModelFormatVersion;
    PipelineConfig config;  // tau always resolved
    std::vector<std::string> labels;
    std::vector<SuperSample> supers;
    PcaModel pca;
    std::vector<ClassGaussian> gaussians;

    std::size_t tau() const { return *config.tau; }
};

/// Per class: K-means/DBA super samples; then every sample is rescaled,
/// vectorized, embedded by PCA and the class Gaussians are fitted.
GestureModel train(const std::vector<LabeledSequence>& dataset, PipelineConfig cfg);

struct Recognition {
    Verdict verdict;
    RescaleResult rescaled;
    Eigen::VectorXd embedding;
};

Recognition recognize(const GestureModel& model, const CenterSeq& seq, bool open_ended);

struct Report {
    std::vector<std::string> labels;
    /// rows: true class; columns: predicted class, last column = rejected
    std::vector<std::vector<std::size_t>> confusion;
    std::vector<std::size_t> totals;
    std::vector<std::optional<double>> recognition_rate;  // absent for classes with no test samples
    std::vector<std::size_t> rejections;
    std::size_t unspecified_count = 0;
    std::optional<double> false_detection_rate;
    std::vector<std::optional<double>> false_detection_by_class;

    double overall_recognition() const;
    std::string table() const;
    nlohmann::json to_json() const;
};

Report evaluate(const GestureModel& model, const std::vector<LabeledSequence>& test,
                const std::vector<CenterSeq>& unspecified);

nlohmann::json model_to_json(const GestureModel& model);
GestureModel model_from_json(const nlohmann::json& j);
std::string serialize_model(const GestureModel& model);
GestureModel deserialize_model(const std::string& text);
void save_model(const GestureModel& model, const std::filesystem::path& path);
GestureModel load_model(const std::filesystem::path& path);

/// One line of a dataset manifest: "<label> <split> <path>", path relative to the manifest.
/// The path is a frame directory or a centers file.
struct ManifestEntry {
    std::string label;
    std::string split;
    std::filesystem::path path;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);
void write_manifest(const std::filesystem::path& manifest, const std::vector<ManifestEntry>& entries);

/// Loads the entries of one split, extracting frame directories with `extractor`.
/// Sequences without any motion are skipped and counted in `skipped`.
std::vector<LabeledSequence> load_split(const std::vector<ManifestEntry>& entries, const std::string& split,
                                        const Extractor& extractor, std::size_t* skipped = nullptr);

struct SweepOptions {
    std::size_t width = 640;
    std::size_t height = 480;
    std::size_t block = 16;
    std::vector<std::size_t> measurements{50, 100, 150, 200, 250, 300};
    std::vector<std::size_t> template_sizes{3, 4, 5, 6};
    std::size_t trials = 5;
    std::uint64_t seed = 2016;
    std::size_t duration = 60;
    double amplitude = 0.6;
    double jitter_sigma = 0.0;
    std::size_t rect_pixels = 80;
    double noise_sigma = 4.0;
};

struct SweepRow {
    std::size_t measurements = 0;
    double mean_error = 0.0;  // blocks, against uncompressed extraction
    double truth_error = 0.0;  // blocks, against the synthetic ground truth
    double agreement = 0.0;  // fraction of frames with the same template
    std::size_t missed = 0;  // frames gated out in the compressed domain only
    std::size_t frames = 0;
};

/// Error of compressed-domain extraction versus M on a synthetic Z gesture.
std::vector<SweepRow> sweep_measurements(const SweepOptions& opts);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace csg
