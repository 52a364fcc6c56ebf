#include "csgesture/sensing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "csgesture/error.hpp"
#include "csgesture/rng.hpp"

namespace csg {

Frame::Frame(std::size_t w, std::size_t h, std::uint8_t fill) : width(w), height(h), pixels(w * h, fill) {
    if (w == 0 || h == 0) fail(ErrorCode::DimensionMismatch, "frame dimensions must be positive");
}

Frame::Frame(std::size_t w, std::size_t h, std::vector<std::uint8_t> data)
    : width(w), height(h), pixels(std::move(data)) {
    if (w == 0 || h == 0) fail(ErrorCode::DimensionMismatch, "frame dimensions must be positive");
    if (pixels.size() != w * h) fail(ErrorCode::DimensionMismatch, "pixel count does not match width*height");
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in, const std::filesystem::path& path) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n' && c != '\r') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (token.empty()) fail(ErrorCode::ParseError, "truncated PGM header in " + path.string());
    if (c == '#') in.unget();
    return token;
}

std::size_t header_number(std::istream& in, const std::filesystem::path& path, const char* field) {
    const std::string token = next_token(in, path);
    if (!std::all_of(token.begin(), token.end(), [](unsigned char ch) { return std::isdigit(ch); }))
        fail(ErrorCode::ParseError, std::string("bad ") + field + " '" + token + "' in " + path.string());
    try {
        return std::stoul(token);
    } catch (const std::exception&) {
        fail(ErrorCode::ParseError, std::string("bad ") + field + " in " + path.string());
    }
}

}  // namespace

Frame read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());

    if (next_token(in, path) != "P5") fail(ErrorCode::ParseError, "not a binary PGM (P5): " + path.string());
    const std::size_t width = header_number(in, path, "width");
    const std::size_t height = header_number(in, path, "height");
    const std::size_t maxval = header_number(in, path, "maxval");
    if (width == 0 || height == 0) fail(ErrorCode::ParseError, "zero-sized PGM: " + path.string());
    if (maxval == 0 || maxval > 255) fail(ErrorCode::ParseError, "only 8-bit PGM is supported: " + path.string());
    // next_token consumed exactly one whitespace byte after maxval

    std::vector<std::uint8_t> data(width * height);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (static_cast<std::size_t>(in.gcount()) != data.size())
        fail(ErrorCode::ParseError, "truncated PGM raster: " + path.string());

    if (maxval != 255) {
        for (auto& p : data) {
            p = static_cast<std::uint8_t>(std::lround(std::min<double>(p, maxval) * 255.0 / maxval));
        }
    }
    return Frame(width, height, std::move(data));
}

void write_pgm(const std::filesystem::path& path, const Frame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    out << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()), static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) fail(ErrorCode::IoError, "write failed: " + path.string());
}

std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) fail(ErrorCode::IoError, "not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

std::vector<Frame> load_frame_sequence(const std::filesystem::path& dir) {
    const auto files = list_frame_files(dir);
    if (files.size() < 2)
        fail(ErrorCode::InsufficientFrames, "need at least 2 frames in " + dir.string());

    std::vector<Frame> frames;
    frames.reserve(files.size());
    for (const auto& f : files) {
        frames.push_back(read_pgm(f));
        if (frames.back().width != frames.front().width || frames.back().height != frames.front().height)
            fail(ErrorCode::DimensionMismatch, "frame " + f.filename().string() + " differs in size from " +
                                                   files.front().filename().string());
    }
    return frames;
}

DiffImage diff_image(const Frame& prev, const Frame& next) {
    if (prev.width != next.width || prev.height != next.height)
        fail(ErrorCode::DimensionMismatch, "diff_image: frames differ in size");
    DiffImage d{prev.width, prev.height, std::vector<double>(prev.pixels.size())};
    for (std::size_t k = 0; k < d.values.size(); ++k) {
        d.values[k] = std::abs(static_cast<double>(next.pixels[k]) - static_cast<double>(prev.pixels[k]));
    }
    return d;
}

namespace {

void check_block(std::size_t width, std::size_t height, std::size_t block) {
    if (block == 0 || width % block != 0 || height % block != 0)
        fail(ErrorCode::BlockSizeError, "block size " + std::to_string(block) + " does not divide " +
                                            std::to_string(width) + "x" + std::to_string(height));
}

// Shared reduction; `pixel(k)` yields the row-major pixel value at flat index k.
template <typename PixelFn>
BlockVector pool(std::size_t width, std::size_t height, std::size_t block, PixelFn pixel) {
    check_block(width, height, block);
    BlockVector out{width / block, height / block, {}};
    out.values.assign(out.grid_w * out.grid_h, 0.0);
    for (std::size_t row = 0; row < height; ++row) {
        double* dst = out.values.data() + (row / block) * out.grid_w;
        const std::size_t base = row * width;
        for (std::size_t bc = 0; bc < out.grid_w; ++bc) {
            double acc = 0.0;
            const std::size_t start = base + bc * block;
            for (std::size_t k = start; k < start + block; ++k) acc += pixel(k);
            dst[bc] += acc;
        }
    }
    const double inv_area = 1.0 / static_cast<double>(block * block);
    for (auto& v : out.values) v *= inv_area;
    return out;
}

}  // namespace

BlockVector block_average(const DiffImage& diff, std::size_t block) {
    if (diff.values.size() != diff.width * diff.height)
        fail(ErrorCode::DimensionMismatch, "block_average: malformed image");
    return pool(diff.width, diff.height, block, [&](std::size_t k) { return diff.values[k]; });
}

BlockVector block_average_diff(const Frame& prev, const Frame& next, std::size_t block) {
    if (prev.width != next.width || prev.height != next.height)
        fail(ErrorCode::DimensionMismatch, "diff_image: frames differ in size");
    const auto* a = prev.pixels.data();
    const auto* b = next.pixels.data();
    return pool(prev.width, prev.height, block, [&](std::size_t k) {
        return static_cast<double>(a[k] > b[k] ? a[k] - b[k] : b[k] - a[k]);
    });
}

CodeMatrix::CodeMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed)
    : rows_(rows), cols_(cols), seed_(seed) {
    if (rows == 0 || cols == 0) fail(ErrorCode::EmptyMatrix, "code matrix needs M >= 1 and N >= 1");
    entries_.resize(rows * cols);
    SplitMix64 gen(seed);
    for (auto& e : entries_) e = (gen.next() & 1U) ? std::int8_t{1} : std::int8_t{-1};
}

CodeMatrix make_phi(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    return CodeMatrix(rows, cols, seed);
}

MeasurementVector project(const CodeMatrix& phi, std::span<const double> y) {
    if (y.size() != phi.cols())
        fail(ErrorCode::DimensionMismatch, "project: phi has " + std::to_string(phi.cols()) +
                                               " columns but y has " + std::to_string(y.size()) + " entries");
    MeasurementVector out(phi.rows(), 0.0);
    for (std::size_t r = 0; r < phi.rows(); ++r) {
        const auto row = phi.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < y.size(); ++c) acc += row[c] > 0 ? y[c] : -y[c];
        out[r] = acc;
    }
    return out;
}

}  // namespace csg
