#pragma once

// Deterministic synthetic gestures: parametric hand paths, rendered as a
// bright rectangle moving over a flat background, with ground truth.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csgesture/sensing.hpp"
#include "csgesture/tseries.hpp"

namespace csg {

enum class GestureClass { Plus, Circle, N, X, Z };

inline constexpr GestureClass kAllGestureClasses[] = {GestureClass::Plus, GestureClass::Circle, GestureClass::N,
                                                      GestureClass::X, GestureClass::Z};

/// "+", "O", "N", "X", "Z".
std::string_view label_of(GestureClass cls);
std::optional<GestureClass> parse_gesture_class(std::string_view label);

struct GestureSpec {
    GestureClass cls = GestureClass::Z;
    std::size_t duration = 40;  // frames
    double amplitude = 0.6;  // fraction of the frame spanned by the path
    double jitter_sigma = 0.0;  // pixels
    std::uint64_t seed = 0;

    /// Throws ConfigError when the invariants do not hold.
    void validate() const;
};

/// Hand path in pixel coordinates (x = column, y = row).
struct GroundTruth {
    std::vector<Point2> positions;  // one per frame
    std::vector<Point2> centers;  // one per difference image: midpoints of consecutive positions
};

GroundTruth gen_trajectory(const GestureSpec& spec, std::size_t width, std::size_t height);

/// Unspecified motion: seeded 2-D random walk smoothed by a 5-frame moving average.
GroundTruth gen_random_walk(std::size_t duration, double amplitude, double step_fraction, std::uint64_t seed,
                            std::size_t width, std::size_t height);

struct RenderOptions {
    std::size_t rect_pixels = 64;
    std::uint8_t intensity = 200;
    std::uint8_t background = 0;
    double noise_sigma = 0.0;  // additive per-pixel Gaussian noise
    std::uint64_t noise_seed = 0;
};

std::vector<Frame> render_frames(const GroundTruth& truth, std::size_t width, std::size_t height,
                                 const RenderOptions& opts);

/// Ground-truth centers of the difference images in block units.
std::vector<Point2> truth_in_blocks(const GroundTruth& truth, std::size_t block);

/// Normalized CenterSeq of the ground truth (used where extraction is bypassed).
CenterSeq truth_normalized(const GroundTruth& truth, std::size_t width, std::size_t height);

/// Sidecar: one "index x y r" line per difference image, block units.
void write_truth(const std::filesystem::path& path, const GroundTruth& truth, std::size_t block,
                 std::size_t rect_pixels);

struct DatasetOptions {
    std::size_t width = 640;
    std::size_t height = 480;
    std::size_t min_duration = 30;
    std::size_t max_duration = 60;
    double min_amplitude = 0.5;
    double max_amplitude = 0.7;
    double jitter_sigma = 3.0;
    double walk_step = 0.06;
    RenderOptions render;
};

struct SyntheticSample {
    std::string label;  // "" for unspecified motion
    GroundTruth truth;
    std::vector<Frame> frames;
};

/// The index-th sample of a class; draws its duration/amplitude/jitter from the seed.
SyntheticSample make_gesture_sample(GestureClass cls, std::size_t index, std::uint64_t seed,
                                    const DatasetOptions& opts);

SyntheticSample make_unspecified_sample(std::size_t index, std::uint64_t seed, const DatasetOptions& opts);

}  // namespace csg
