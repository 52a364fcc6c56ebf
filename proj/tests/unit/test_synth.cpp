#include <array>
#include <cmath>
#include <fstream>

#include "csgesture/pipeline.hpp"
#include "csgesture/synth.hpp"
#include "helpers.hpp"

using namespace csg;

namespace {

// Index of the Z stroke (0 top, 1 diagonal, 2 bottom) containing p, or -1.
int z_stroke(const Point2& p, double x0, double x1, double y0, double y1) {
    const double tol = 1e-6;
    if (std::abs(p.y - y0) < tol) return 0;
    if (std::abs(p.y - y1) < tol) return 2;
    // diagonal from (x1, y0) to (x0, y1)
    const double u = (x1 - p.x) / (x1 - x0), v = (p.y - y0) / (y1 - y0);
    if (std::abs(u - v) < tol) return 1;
    return -1;
}

double fraction_within_one_block(const GroundTruth& truth, const ExtractedSequence& seq, std::size_t block) {
    const auto blocks = truth_in_blocks(truth, block);
    std::size_t good = 0;
    for (const auto& c : seq.centers) {
        const auto& t = blocks[c.frame_index];
        if (std::hypot(c.center.x - t.x, c.center.y - t.y) <= 1.0) ++good;
    }
    return static_cast<double>(good) / static_cast<double>(blocks.size());
}

}  // namespace

TEST_CASE("gesture labels") {
    CHECK(label_of(GestureClass::Plus) == "+");
    CHECK(label_of(GestureClass::Circle) == "O");
    for (auto cls : kAllGestureClasses) CHECK(parse_gesture_class(label_of(cls)) == cls);
    CHECK_FALSE(parse_gesture_class("Q").has_value());
}

TEST_CASE("GestureSpec invariants") {
    CHECK_CODE((GestureSpec{GestureClass::Z, 7, 0.5, 0, 1}.validate()), ErrorCode::ConfigError);
    CHECK_CODE((GestureSpec{GestureClass::Z, 8, 0.0, 0, 1}.validate()), ErrorCode::ConfigError);
    CHECK_CODE((GestureSpec{GestureClass::Z, 8, 1.5, 0, 1}.validate()), ErrorCode::ConfigError);
    CHECK_CODE((GestureSpec{GestureClass::Z, 8, 0.5, -1, 1}.validate()), ErrorCode::ConfigError);
    CHECK_NOTHROW((GestureSpec{GestureClass::Z, 8, 1.0, 0, 1}.validate()));
}

TEST_CASE("Z trajectory without jitter is three strokes in order") {
    const GestureSpec spec{GestureClass::Z, 60, 0.6, 0.0, 3};
    const auto truth = gen_trajectory(spec, 640, 480);
    REQUIRE(truth.positions.size() == 60);
    CHECK(truth.centers.size() == 59);
    const double x0 = 640 * 0.2, x1 = 640 * 0.8, y0 = 480 * 0.2, y1 = 480 * 0.8;
    int last = 0;
    std::array<int, 3> seen{};
    for (const auto& p : truth.positions) {
        const int s = z_stroke(p, x0, x1, y0, y1);
        REQUIRE(s >= 0);
        CHECK(s >= last);
        last = s;
        ++seen[static_cast<std::size_t>(s)];
    }
    CHECK(seen[0] > 2);
    CHECK(seen[1] > 2);
    CHECK(seen[2] > 2);
}

TEST_CASE("trajectories are deterministic and bounded by the amplitude") {
    for (auto cls : kAllGestureClasses) {
        const GestureSpec spec{cls, 45, 0.5, 4.0, 17};
        const auto a = gen_trajectory(spec, 640, 480), b = gen_trajectory(spec, 640, 480);
        CHECK(a.positions == b.positions);
        for (const auto& p : a.positions) {
            CHECK(p.x >= 160.0);
            CHECK(p.x <= 480.0);
            CHECK(p.y >= 120.0);
            CHECK(p.y <= 360.0);
        }
    }
    const auto c = gen_trajectory({GestureClass::Circle, 40, 0.6, 0.0, 1}, 640, 480);
    CHECK(distance(c.positions.front(), c.positions.back()) < 1e-9);
}

TEST_CASE("random walk is smooth, seeded and bounded") {
    const auto a = gen_random_walk(50, 0.6, 0.06, 9, 640, 480);
    const auto b = gen_random_walk(50, 0.6, 0.06, 9, 640, 480);
    CHECK(a.positions == b.positions);
    CHECK(a.centers.size() == 49);
    for (const auto& p : a.positions) {
        CHECK(p.x >= 128.0 - 1e-9);
        CHECK(p.x <= 512.0 + 1e-9);
    }
    CHECK_FALSE(gen_random_walk(50, 0.6, 0.06, 10, 640, 480).positions == a.positions);
}

TEST_CASE("render_frames") {
    RenderOptions opts;
    opts.rect_pixels = 32;

    SUBCASE("static trajectory gives zero differences") {
        GroundTruth t;
        t.positions.assign(5, Point2{100, 80});
        const auto frames = render_frames(t, 320, 240, opts);
        for (std::size_t i = 1; i < frames.size(); ++i) {
            const auto d = diff_image(frames[i - 1], frames[i]);
            CHECK(std::all_of(d.values.begin(), d.values.end(), [](double v) { return v == 0.0; }));
        }
    }
    SUBCASE("diagonal step lights only the union of the two rectangles") {
        GroundTruth t;
        t.positions = {{100, 80}, {110, 90}};
        const auto frames = render_frames(t, 320, 240, opts);
        const auto d = diff_image(frames[0], frames[1]);
        auto inside = [](std::size_t r, std::size_t c, double cx, double cy) {
            return c >= cx - 16 && c < cx + 16 && r >= cy - 16 && r < cy + 16;
        };
        std::size_t lit = 0;
        for (std::size_t r = 0; r < 240; ++r)
            for (std::size_t c = 0; c < 320; ++c)
                if (d.values[r * 320 + c] > 0) {
                    ++lit;
                    CHECK((inside(r, c, 100, 80) || inside(r, c, 110, 90)));
                }
        CHECK(lit > 0);
        CHECK(frames[0].at(80, 100) == opts.intensity);
    }
    SUBCASE("same spec renders byte-identical frames") {
        DatasetOptions d;
        d.render.noise_sigma = 3.0;
        const auto a = make_gesture_sample(GestureClass::N, 4, 11, d);
        const auto b = make_gesture_sample(GestureClass::N, 4, 11, d);
        CHECK(a.frames == b.frames);
        CHECK(a.label == "N");
        CHECK(make_unspecified_sample(2, 11, d).frames == make_unspecified_sample(2, 11, d).frames);
        CHECK(make_unspecified_sample(2, 11, d).label.empty());
    }
    SUBCASE("out of bounds") {
        GroundTruth t;
        t.positions = {{5, 5}};
        CHECK_CODE(render_frames(t, 320, 240, opts), ErrorCode::OutOfBounds);
        opts.rect_pixels = 400;
        t.positions = {{160, 120}};
        CHECK_CODE(render_frames(t, 320, 240, opts), ErrorCode::OutOfBounds);
    }
}

TEST_CASE("truth sidecar has one line per difference image") {
    testutil::TempDir dir("truth");
    const auto t = gen_trajectory({GestureClass::X, 20, 0.6, 0.0, 1}, 640, 480);
    write_truth(dir / "truth.txt", t, 16, 64);
    std::ifstream in(dir / "truth.txt");
    std::size_t idx = 0, lines = 0;
    double x, y, r;
    while (in >> idx >> x >> y >> r) {
        CHECK(idx == lines);
        CHECK(r == 4.0);
        CHECK(x == doctest::Approx(truth_in_blocks(t, 16)[lines].x));
        ++lines;
    }
    CHECK(lines == 19);
}

TEST_CASE("rendered Z is recovered within one block") {
    // 30x40 grid; path speed is well above one block per frame. A 5-block
    // rectangle avoids exact ties between vertically shifted 6-block templates.
    const GestureSpec spec{GestureClass::Z, 40, 0.6, 0.0, 5};
    const auto truth = gen_trajectory(spec, 640, 480);
    RenderOptions ro;
    ro.rect_pixels = 80;
    const auto frames = render_frames(truth, 640, 480, ro);

    PipelineConfig cfg;
    cfg.block = 16;

    SUBCASE("uncompressed extraction") {
        cfg.measurements = 0;
        const Extractor ex(cfg);
        CHECK(fraction_within_one_block(truth, extract_sequence(frames, ex), 16) >= 0.95);
    }
    SUBCASE("compressed extraction with M = N") {
        cfg.measurements = cfg.cells();
        const Extractor ex(cfg);
        CHECK(ex.compressed());
        CHECK(fraction_within_one_block(truth, extract_sequence(frames, ex), 16) >= 0.95);
    }
}
