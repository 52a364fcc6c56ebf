#include "csgesture/motion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csgesture/error.hpp"

namespace csg {

std::vector<double> Template::vector(std::size_t grid_w, std::size_t grid_h) const {
    std::vector<double> v(grid_w * grid_h, 0.0);
    for (std::size_t i = row0; i < row0 + r; ++i)
        for (std::size_t j = col0; j < col0 + r; ++j) v[i * grid_w + j] = level();
    return v;
}

TemplateBank::TemplateBank(std::size_t grid_w, std::size_t grid_h, std::vector<std::size_t> sizes)
    : grid_w_(grid_w), grid_h_(grid_h), sizes_(std::move(sizes)) {
    if (sizes_.empty()) fail(ErrorCode::ConfigError, "template size set is empty");
    std::sort(sizes_.begin(), sizes_.end());
    sizes_.erase(std::unique(sizes_.begin(), sizes_.end()), sizes_.end());
    for (auto r : sizes_) {
        if (r == 0 || r > std::min(grid_w_, grid_h_))
            fail(ErrorCode::ConfigError, "template size " + std::to_string(r) + " does not fit a " +
                                             std::to_string(grid_h_) + "x" + std::to_string(grid_w_) + " grid");
    }
    for (auto r : sizes_)
        for (std::size_t i = 0; i + r <= grid_h_; ++i)
            for (std::size_t j = 0; j + r <= grid_w_; ++j) templates_.push_back({i, j, r});
}

std::optional<std::size_t> TemplateBank::find(std::size_t row0, std::size_t col0, std::size_t r) const {
    std::size_t offset = 0;
    for (auto s : sizes_) {
        const std::size_t rows = grid_h_ - s + 1;
        const std::size_t cols = grid_w_ - s + 1;
        if (s == r) {
            if (row0 >= rows || col0 >= cols) return std::nullopt;
            return offset + row0 * cols + col0;
        }
        offset += rows * cols;
    }
    return std::nullopt;
}

TemplateBank build_bank(std::size_t grid_w, std::size_t grid_h, std::vector<std::size_t> sizes) {
    return TemplateBank(grid_w, grid_h, std::move(sizes));
}

namespace {

// (h+1) x (w+1) summed-area table of a row-major grid.
template <typename T>
std::vector<double> summed_area(std::span<const T> grid, std::size_t w, std::size_t h) {
    std::vector<double> s((w + 1) * (h + 1), 0.0);
    for (std::size_t i = 0; i < h; ++i) {
        double row_acc = 0.0;
        for (std::size_t j = 0; j < w; ++j) {
            row_acc += static_cast<double>(grid[i * w + j]);
            s[(i + 1) * (w + 1) + j + 1] = s[i * (w + 1) + j + 1] + row_acc;
        }
    }
    return s;
}

double rect_sum(const std::vector<double>& sat, std::size_t w, const Template& t) {
    const std::size_t stride = w + 1;
    const std::size_t top = t.row0, left = t.col0, bottom = t.row0 + t.r, right = t.col0 + t.r;
    return sat[bottom * stride + right] - sat[top * stride + right] - sat[bottom * stride + left] +
           sat[top * stride + left];
}

MotionCenter make_center(const Template& t, std::size_t index, double score) {
    return {t.center_x(), t.center_y(), t.r, score, index};
}

}  // namespace

CompressedBank compress_bank(const TemplateBank& bank, const CodeMatrix& phi) {
    if (phi.cols() != bank.cells())
        fail(ErrorCode::DimensionMismatch, "compress_bank: phi has " + std::to_string(phi.cols()) +
                                               " columns, grid has " + std::to_string(bank.cells()) + " cells");
    const auto n_templates = static_cast<Eigen::Index>(bank.size());
    const auto m = static_cast<Eigen::Index>(phi.rows());

    CompressedBank out;
    out.rows = phi.rows();
    out.cols = phi.cols();
    out.seed = phi.seed();
    out.unit.resize(n_templates, m);

    // Phi*X for a rectangle indicator is a rectangle sum over each reshaped row of Phi.
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto sat = summed_area(phi.row(static_cast<std::size_t>(k)), bank.grid_w(), bank.grid_h());
        for (Eigen::Index t = 0; t < n_templates; ++t) {
            const auto& tpl = bank[static_cast<std::size_t>(t)];
            out.unit(t, k) = rect_sum(sat, bank.grid_w(), tpl) * tpl.level();
        }
    }
    out.norms = out.unit.rowwise().norm();
    for (Eigen::Index t = 0; t < n_templates; ++t) {
        if (!(out.norms[t] >= 1e-12))
            fail(ErrorCode::RankDeficiency, "compressed template " + std::to_string(t) + " vanished under phi");
        out.unit.row(t) /= out.norms[t];
    }
    return out;
}

std::optional<MotionCenter> extract_center(std::span<const double> y, const TemplateBank& bank,
                                           double activity_threshold) {
    if (y.size() != bank.cells())
        fail(ErrorCode::DimensionMismatch, "extract_center: vector length " + std::to_string(y.size()) +
                                               " vs grid " + std::to_string(bank.cells()));
    double sq = 0.0;
    for (double v : y) sq += v * v;
    const double norm = std::sqrt(sq);
    if (!(norm >= activity_threshold) || norm == 0.0) return std::nullopt;

    const auto sat = summed_area(y, bank.grid_w(), bank.grid_h());
    std::size_t best = 0;
    double best_score = -2.0;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        const auto& t = bank[i];
        const double score = rect_sum(sat, bank.grid_w(), t) * t.level();
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return make_center(bank[best], best, best_score / norm);
}

std::optional<MotionCenter> extract_center_compressed(std::span<const double> measurements,
                                                      const CompressedBank& cbank, const TemplateBank& bank,
                                                      double activity_threshold) {
    if (measurements.size() != cbank.rows)
        fail(ErrorCode::DimensionMismatch, "extract_center_compressed: expected " + std::to_string(cbank.rows) +
                                               " measurements, got " + std::to_string(measurements.size()));
    if (cbank.size() != bank.size())
        fail(ErrorCode::DimensionMismatch, "compressed bank does not match template bank");

    const Eigen::Map<const Eigen::VectorXd> yhat(measurements.data(), static_cast<Eigen::Index>(measurements.size()));
    const double norm = yhat.norm();
    if (!(norm >= activity_threshold) || norm == 0.0) return std::nullopt;

    const Eigen::VectorXd scores = cbank.unit * yhat;
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    const auto idx = static_cast<std::size_t>(best);
    return make_center(bank[idx], idx, scores[best] / norm);
}

double default_activity_threshold(std::size_t cells) {
    return 0.02 * 255.0 * std::sqrt(static_cast<double>(cells));
}

double default_compressed_threshold(double activity_threshold, std::size_t measurements) {
    return activity_threshold * std::sqrt(static_cast<double>(measurements)) * 0.5;
}

}  // namespace csg
