#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace csg {

/// Every tunable of the acquisition, extraction, training and streaming stages.
struct PipelineConfig {
    std::size_t frame_width = 640;
    std::size_t frame_height = 480;
    std::size_t block = 20;
    std::size_t measurements = 200;  // 0 bypasses the random projection
    std::uint64_t phi_seed = 1;
    std::vector<std::size_t> template_sizes{3, 4, 5, 6};
    std::optional<double> activity_threshold;  // unset: 2% of 255*sqrt(N)
    std::optional<double> compressed_threshold;  // unset: activity * sqrt(M) * 0.5

    std::optional<std::size_t> tau;  // unset: mean training length
    std::size_t clusters_per_class = 1;
    std::uint64_t kmeans_seed = 7;
    std::size_t kmeans_max_iter = 20;
    std::size_t dba_max_iter = 30;
    double dba_tol = 1e-6;
    std::size_t pca_dims = 3;
    double chi2_threshold = 11.345;

    std::size_t fifo_length = 120;
    std::size_t gate_min_active = 8;
    std::size_t gate_quiet = 5;
    bool open_ended = true;
    bool clear_after_event = true;
    bool classify_every_frame = false;

    std::size_t grid_w() const { return frame_width / block; }
    std::size_t grid_h() const { return frame_height / block; }
    std::size_t cells() const { return grid_w() * grid_h(); }
    double activity_threshold_value() const;
    double compressed_threshold_value() const;

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys are rejected.
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
std::string to_config_text(const PipelineConfig& cfg);

nlohmann::json to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const nlohmann::json& j);

}  // namespace csg
