#pragma once

// Dynamic time warping kernels over 2-D motion-center sequences, DBA
// barycenters, K-means under DTW, and DTW length rescaling.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace csg {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

/// Motion centers over time, coordinates normalized to [0, 1].
using CenterSeq = std::vector<Point2>;

/// Alignment as 0-based (index into first sequence, index into second sequence) pairs.
using WarpPath = std::vector<std::pair<std::size_t, std::size_t>>;

enum class LocalCost { Euclidean, SquaredEuclidean };

struct DtwResult {
    double distance = 0.0;
    WarpPath path;
};

/// Full DTW. `window`, when set, is a Sakoe-Chiba band half-width in samples.
DtwResult dtw(const CenterSeq& a, const CenterSeq& b, LocalCost cost = LocalCost::Euclidean,
              std::optional<std::size_t> window = std::nullopt);

/// Distance only, O(m) memory.
double dtw_distance(const CenterSeq& a, const CenterSeq& b, LocalCost cost = LocalCost::Euclidean);

struct OpenEndResult {
    double distance = 0.0;
    std::size_t start = 0;  // matched buffer window, inclusive
    std::size_t end = 0;
    WarpPath path;  // (buffer index, template index)
};

/// Subsequence DTW: the template must be matched completely, the buffer only on a window.
OpenEndResult dtw_open_end(const CenterSeq& buffer, const CenterSeq& templ);

struct SuperSample {
    CenterSeq points;
    std::string label;
    std::size_t cluster = 0;
};

struct DbaOptions {
    std::size_t max_iter = 30;
    double tol = 1e-6;
};

struct DbaResult {
    CenterSeq barycenter;
    /// Sum of squared-cost DTW from each sequence to the barycenter; entry k is for the k-th
    /// barycenter (entry 0 is the initial one).
    std::vector<double> objective;
};

/// DBA with a fixed barycenter length (= init.size()).
DbaResult dba(const std::vector<CenterSeq>& sequences, const CenterSeq& init, const DbaOptions& opts = {});

struct KMeansOptions {
    std::size_t max_iter = 20;
    std::uint64_t seed = 0;
    DbaOptions dba;
};

struct KMeansResult {
    std::vector<CenterSeq> centers;
    std::vector<std::size_t> assignment;
    std::size_t iterations = 0;
};

KMeansResult kmeans_dtw(const std::vector<CenterSeq>& samples, std::size_t k, std::size_t tau,
                        const KMeansOptions& opts = {});

/// Linear index interpolation onto `length` points.
CenterSeq resample_linear(const CenterSeq& s, std::size_t length);

struct RescaleResult {
    CenterSeq points;
    std::size_t super_index = 0;
    double distance = 0.0;
    std::size_t start = 0;  // window of the input that was used
    std::size_t end = 0;
};

/// Maps `t` onto the length of the super samples via its alignment with the nearest one.
RescaleResult rescale(const CenterSeq& t, const std::vector<SuperSample>& supers, bool open_ended = false);

inline double distance(const Point2& a, const Point2& b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace csg
