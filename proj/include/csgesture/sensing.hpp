#pragma once

// Acquisition side: frames, difference images, block averaging and the
// random +/-1 projection into the compressed domain.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace csg {

/// 8-bit grayscale image, row-major.
struct Frame {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    Frame() = default;
    Frame(std::size_t w, std::size_t h, std::uint8_t fill = 0);
    Frame(std::size_t w, std::size_t h, std::vector<std::uint8_t> data);

    std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
    std::uint8_t& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }

    bool operator==(const Frame&) const = default;
};

/// Absolute difference of two consecutive frames, values in [0, 255].
struct DiffImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> values;
};

/// Block-averaged image, vectorized row-major: N = grid_w * grid_h.
struct BlockVector {
    std::size_t grid_w = 0;
    std::size_t grid_h = 0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// M x N matrix of +/-1 entries regenerated from (M, N, seed).
class CodeMatrix {
public:
    CodeMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint64_t seed() const { return seed_; }

    std::int8_t at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    std::span<const std::int8_t> row(std::size_t r) const {
        return {entries_.data() + r * cols_, cols_};
    }
    std::span<const std::int8_t> entries() const { return entries_; }

    bool operator==(const CodeMatrix&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::uint64_t seed_;
    std::vector<std::int8_t> entries_;
};

using MeasurementVector = std::vector<double>;

Frame read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Frame& frame);

/// Loads every *.pgm in `dir`, ordered by filename.
std::vector<Frame> load_frame_sequence(const std::filesystem::path& dir);

/// Sorted list of the *.pgm files in `dir`.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

DiffImage diff_image(const Frame& prev, const Frame& next);

/// Mean-pools non-overlapping block x block tiles. `block` must divide both dimensions.
BlockVector block_average(const DiffImage& diff, std::size_t block);

/// Fused diff_image + block_average, without the intermediate image.
BlockVector block_average_diff(const Frame& prev, const Frame& next, std::size_t block);

CodeMatrix make_phi(std::size_t rows, std::size_t cols, std::uint64_t seed);

MeasurementVector project(const CodeMatrix& phi, std::span<const double> y);
inline MeasurementVector project(const CodeMatrix& phi, const BlockVector& y) {
    return project(phi, std::span<const double>(y.values));
}

}  // namespace csg
