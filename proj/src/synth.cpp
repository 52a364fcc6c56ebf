#include "csgesture/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "csgesture/error.hpp"
#include "csgesture/rng.hpp"

namespace csg {

std::string_view label_of(GestureClass cls) {
    switch (cls) {
        case GestureClass::Plus: return "+";
        case GestureClass::Circle: return "O";
        case GestureClass::N: return "N";
        case GestureClass::X: return "X";
        case GestureClass::Z: return "Z";
    }
    return "?";
}

std::optional<GestureClass> parse_gesture_class(std::string_view label) {
    for (auto cls : kAllGestureClasses)
        if (label_of(cls) == label) return cls;
    if (label == "plus") return GestureClass::Plus;
    if (label == "circle" || label == "o") return GestureClass::Circle;
    return std::nullopt;
}

void GestureSpec::validate() const {
    if (duration < 8) fail(ErrorCode::ConfigError, "gesture duration must be at least 8 frames");
    if (!(amplitude > 0.0 && amplitude <= 1.0)) fail(ErrorCode::ConfigError, "gesture amplitude must be in (0, 1]");
    if (!(jitter_sigma >= 0.0)) fail(ErrorCode::ConfigError, "jitter sigma must be non-negative");
}

namespace {

// Strokes in the unit box, u to the right and v downwards.
std::vector<Point2> polyline(GestureClass cls) {
    switch (cls) {
        case GestureClass::Z: return {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
        case GestureClass::N: return {{0, 1}, {0, 0}, {1, 1}, {1, 0}};
        case GestureClass::X: return {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
        case GestureClass::Plus: return {{0.5, 0}, {0.5, 1}, {0, 0.5}, {1, 0.5}};
        case GestureClass::Circle: break;
    }
    return {};
}

// Constant-speed point at arc-length fraction s in [0, 1].
Point2 along(const std::vector<Point2>& poly, double s) {
    double total = 0.0;
    for (std::size_t k = 1; k < poly.size(); ++k) total += distance(poly[k - 1], poly[k]);
    double target = s * total;
    for (std::size_t k = 1; k < poly.size(); ++k) {
        const double seg = distance(poly[k - 1], poly[k]);
        if (target <= seg || k + 1 == poly.size()) {
            const double w = seg > 0 ? std::clamp(target / seg, 0.0, 1.0) : 0.0;
            return {poly[k - 1].x + w * (poly[k].x - poly[k - 1].x), poly[k - 1].y + w * (poly[k].y - poly[k - 1].y)};
        }
        target -= seg;
    }
    return poly.back();
}

struct Box {
    double x0, x1, y0, y1;

    Box(double amplitude, std::size_t width, std::size_t height)
        : x0(width * (0.5 - 0.5 * amplitude)),
          x1(width * (0.5 + 0.5 * amplitude)),
          y0(height * (0.5 - 0.5 * amplitude)),
          y1(height * (0.5 + 0.5 * amplitude)) {}

    Point2 map(const Point2& unit) const { return {x0 + unit.x * (x1 - x0), y0 + unit.y * (y1 - y0)}; }
    Point2 clamp(const Point2& p) const { return {std::clamp(p.x, x0, x1), std::clamp(p.y, y0, y1)}; }
};

void fill_midpoints(GroundTruth& truth) {
    truth.centers.clear();
    for (std::size_t t = 1; t < truth.positions.size(); ++t) {
        const auto& a = truth.positions[t - 1];
        const auto& b = truth.positions[t];
        truth.centers.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
    }
}

}  // namespace

GroundTruth gen_trajectory(const GestureSpec& spec, std::size_t width, std::size_t height) {
    spec.validate();
    const Box box(spec.amplitude, width, height);
    SplitMix64 rng(spec.seed);
    const auto poly = polyline(spec.cls);

    GroundTruth truth;
    for (std::size_t t = 0; t < spec.duration; ++t) {
        const double s = static_cast<double>(t) / static_cast<double>(spec.duration - 1);
        Point2 unit;
        if (spec.cls == GestureClass::Circle) {
            const double theta = 2.0 * std::numbers::pi * s;
            unit = {0.5 + 0.5 * std::sin(theta), 0.5 - 0.5 * std::cos(theta)};
        } else {
            unit = along(poly, s);
        }
        Point2 p = box.map(unit);
        if (spec.jitter_sigma > 0.0) {
            p.x += rng.normal(0.0, spec.jitter_sigma);
            p.y += rng.normal(0.0, spec.jitter_sigma);
            p = box.clamp(p);
        }
        truth.positions.push_back(p);
    }
    fill_midpoints(truth);
    return truth;
}

GroundTruth gen_random_walk(std::size_t duration, double amplitude, double step_fraction, std::uint64_t seed,
                            std::size_t width, std::size_t height) {
    GestureSpec{GestureClass::Z, duration, amplitude, 0.0, seed}.validate();
    const Box box(amplitude, width, height);
    SplitMix64 rng(seed);

    std::vector<Point2> raw;
    Point2 unit{rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)};
    for (std::size_t t = 0; t < duration; ++t) {
        raw.push_back(unit);
        unit.x = std::clamp(unit.x + rng.normal(0.0, step_fraction), 0.0, 1.0);
        unit.y = std::clamp(unit.y + rng.normal(0.0, step_fraction), 0.0, 1.0);
    }

    GroundTruth truth;
    for (std::size_t t = 0; t < duration; ++t) {
        const std::size_t lo = t >= 2 ? t - 2 : 0;
        const std::size_t hi = std::min(duration - 1, t + 2);
        Point2 acc;
        for (std::size_t k = lo; k <= hi; ++k) {
            acc.x += raw[k].x;
            acc.y += raw[k].y;
        }
        const double n = static_cast<double>(hi - lo + 1);
        truth.positions.push_back(box.map({acc.x / n, acc.y / n}));
    }
    fill_midpoints(truth);
    return truth;
}

std::vector<Frame> render_frames(const GroundTruth& truth, std::size_t width, std::size_t height,
                                 const RenderOptions& opts) {
    if (opts.rect_pixels == 0 || opts.rect_pixels > width || opts.rect_pixels > height)
        fail(ErrorCode::OutOfBounds, "rectangle does not fit the frame");
    SplitMix64 noise(opts.noise_seed);
    const double half = 0.5 * static_cast<double>(opts.rect_pixels);

    std::vector<Frame> frames;
    frames.reserve(truth.positions.size());
    for (std::size_t t = 0; t < truth.positions.size(); ++t) {
        const auto& p = truth.positions[t];
        const double left = std::round(p.x - half);
        const double top = std::round(p.y - half);
        if (left < 0 || top < 0 || left + opts.rect_pixels > width || top + opts.rect_pixels > height)
            fail(ErrorCode::OutOfBounds, "rectangle at frame " + std::to_string(t) + " leaves the frame");

        Frame f(width, height, opts.background);
        const auto col0 = static_cast<std::size_t>(left);
        const auto row0 = static_cast<std::size_t>(top);
        for (std::size_t r = row0; r < row0 + opts.rect_pixels; ++r)
            std::fill_n(f.pixels.begin() + static_cast<std::ptrdiff_t>(r * width + col0), opts.rect_pixels,
                        opts.intensity);
        if (opts.noise_sigma > 0.0) {
            for (auto& px : f.pixels) {
                const double v = static_cast<double>(px) + noise.normal(0.0, opts.noise_sigma);
                px = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
            }
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

std::vector<Point2> truth_in_blocks(const GroundTruth& truth, std::size_t block) {
    std::vector<Point2> out;
    out.reserve(truth.centers.size());
    const double b = static_cast<double>(block);
    for (const auto& c : truth.centers) out.push_back({c.x / b, c.y / b});
    return out;
}

CenterSeq truth_normalized(const GroundTruth& truth, std::size_t width, std::size_t height) {
    CenterSeq out;
    out.reserve(truth.centers.size());
    for (const auto& c : truth.centers)
        out.push_back({c.x / static_cast<double>(width), c.y / static_cast<double>(height)});
    return out;
}

void write_truth(const std::filesystem::path& path, const GroundTruth& truth, std::size_t block,
                 std::size_t rect_pixels) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    const auto blocks = truth_in_blocks(truth, block);
    const double r = static_cast<double>(rect_pixels) / static_cast<double>(block);
    out << std::setprecision(17);
    for (std::size_t i = 0; i < blocks.size(); ++i) out << i << ' ' << blocks[i].x << ' ' << blocks[i].y << ' ' << r << '\n';
}

SyntheticSample make_gesture_sample(GestureClass cls, std::size_t index, std::uint64_t seed,
                                    const DatasetOptions& opts) {
    SplitMix64 rng(mix_seed(seed, index * 8 + static_cast<std::size_t>(cls)));
    GestureSpec spec;
    spec.cls = cls;
    spec.duration = opts.min_duration + rng.below(opts.max_duration - opts.min_duration + 1);
    spec.amplitude = rng.uniform(opts.min_amplitude, opts.max_amplitude);
    spec.jitter_sigma = opts.jitter_sigma;
    spec.seed = rng.next();

    SyntheticSample sample;
    sample.label = std::string(label_of(cls));
    sample.truth = gen_trajectory(spec, opts.width, opts.height);
    RenderOptions render = opts.render;
    render.noise_seed = rng.next();
    sample.frames = render_frames(sample.truth, opts.width, opts.height, render);
    return sample;
}

SyntheticSample make_unspecified_sample(std::size_t index, std::uint64_t seed, const DatasetOptions& opts) {
    SplitMix64 rng(mix_seed(seed, index * 8 + 7));
    const std::size_t duration = opts.min_duration + rng.below(opts.max_duration - opts.min_duration + 1);
    const double amplitude = rng.uniform(opts.min_amplitude, opts.max_amplitude);

    SyntheticSample sample;
    sample.truth = gen_random_walk(duration, amplitude, opts.walk_step, rng.next(), opts.width, opts.height);
    RenderOptions render = opts.render;
    render.noise_seed = rng.next();
    sample.frames = render_frames(sample.truth, opts.width, opts.height, render);
    return sample;
}

}  // namespace csg
