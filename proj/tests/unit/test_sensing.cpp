#include <cmath>
#include <fstream>
#include <numeric>

#include "csgesture/rng.hpp"
#include "csgesture/sensing.hpp"
#include "helpers.hpp"

using namespace csg;

namespace {

Frame random_frame(SplitMix64& rng, std::size_t w, std::size_t h) {
    Frame f(w, h);
    for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng.below(256));
    return f;
}

DiffImage random_diff(SplitMix64& rng, std::size_t w, std::size_t h) {
    DiffImage d{w, h, std::vector<double>(w * h)};
    for (auto& v : d.values) v = rng.uniform(0.0, 255.0);
    return d;
}

}  // namespace

TEST_CASE("frame construction validates its shape") {
    CHECK_CODE(Frame(0, 4), ErrorCode::DimensionMismatch);
    CHECK_CODE(Frame(2, 2, std::vector<std::uint8_t>(3)), ErrorCode::DimensionMismatch);
    const Frame f(3, 2, 9);
    CHECK(f.pixels.size() == 6);
    CHECK(f.at(1, 2) == 9);
}

TEST_CASE("pgm round trip, comments and maxval rescaling") {
    testutil::TempDir dir("pgm");
    SplitMix64 rng(1);
    const Frame f = random_frame(rng, 7, 5);
    write_pgm(dir / "a.pgm", f);
    CHECK(read_pgm(dir / "a.pgm") == f);

    {
        std::ofstream out(dir / "c.pgm", std::ios::binary);
        out << "P5\n# made by hand\n2 1\n# another\n15\n";
        out.put(static_cast<char>(0)).put(static_cast<char>(15));
    }
    const Frame c = read_pgm(dir / "c.pgm");
    CHECK(c.width == 2);
    CHECK(c.height == 1);
    CHECK(c.pixels == std::vector<std::uint8_t>{0, 255});
}

TEST_CASE("malformed pgm files raise ParseError") {
    testutil::TempDir dir("badpgm");
    auto write = [&](const std::string& name, const std::string& bytes) {
        std::ofstream out(dir / name, std::ios::binary);
        out << bytes;
        return dir / name;
    };
    CHECK_CODE(read_pgm(write("p2.pgm", "P2\n2 2\n255\n1 2 3 4\n")), ErrorCode::ParseError);
    CHECK_CODE(read_pgm(write("trunc.pgm", "P5\n4 4\n255\nab")), ErrorCode::ParseError);
    CHECK_CODE(read_pgm(write("hdr.pgm", "P5\n4")), ErrorCode::ParseError);
    CHECK_CODE(read_pgm(write("deep.pgm", "P5\n1 1\n65535\nab")), ErrorCode::ParseError);
    CHECK_CODE(read_pgm(write("neg.pgm", "P5\n-1 1\n255\na")), ErrorCode::ParseError);
    CHECK_CODE(read_pgm(dir / "missing.pgm"), ErrorCode::IoError);
}

TEST_CASE("load_frame_sequence orders by filename") {
    testutil::TempDir dir("seq");
    for (int i = 9; i >= 0; --i) {
        char name[16];
        std::snprintf(name, sizeof name, "%03d.pgm", i);
        write_pgm(dir / name, Frame(640, 480, static_cast<std::uint8_t>(i)));
    }
    std::ofstream(dir / "notes.txt") << "ignored";
    const auto frames = load_frame_sequence(dir.path());
    REQUIRE(frames.size() == 10);
    for (std::size_t i = 0; i < frames.size(); ++i) CHECK(frames[i].pixels[0] == i);
}

TEST_CASE("load_frame_sequence error paths") {
    testutil::TempDir empty("empty");
    CHECK_CODE(load_frame_sequence(empty.path()), ErrorCode::InsufficientFrames);

    testutil::TempDir one("one");
    write_pgm(one / "0.pgm", Frame(4, 4));
    CHECK_CODE(load_frame_sequence(one.path()), ErrorCode::InsufficientFrames);

    testutil::TempDir mixed("mixed");
    write_pgm(mixed / "a.pgm", Frame(320, 240));
    write_pgm(mixed / "b.pgm", Frame(640, 480));
    CHECK_CODE(load_frame_sequence(mixed.path()), ErrorCode::DimensionMismatch);

    testutil::TempDir bad("bad");
    write_pgm(bad / "a.pgm", Frame(4, 4));
    std::ofstream(bad / "b.pgm") << "garbage";
    CHECK_CODE(load_frame_sequence(bad.path()), ErrorCode::ParseError);
}

TEST_CASE("diff_image") {
    SplitMix64 rng(2);
    const Frame a = random_frame(rng, 8, 8), b = random_frame(rng, 8, 8);

    SUBCASE("identical frames give zero") {
        const auto d = diff_image(a, a);
        CHECK(std::all_of(d.values.begin(), d.values.end(), [](double v) { return v == 0.0; }));
    }
    SUBCASE("matches a per-pixel loop") {
        const auto d = diff_image(a, b);
        for (std::size_t r = 0; r < 8; ++r)
            for (std::size_t c = 0; c < 8; ++c) {
                const int expect = std::abs(int(b.at(r, c)) - int(a.at(r, c)));
                CHECK(d.values[r * 8 + c] == expect);
            }
    }
    SUBCASE("symmetric for random pairs") {
        for (int t = 0; t < 20; ++t) {
            const Frame x = random_frame(rng, 6, 4), y = random_frame(rng, 6, 4);
            CHECK(diff_image(x, y).values == diff_image(y, x).values);
        }
    }
    SUBCASE("values bounded") {
        const auto d = diff_image(Frame(4, 4, 0), Frame(4, 4, 255));
        CHECK(*std::max_element(d.values.begin(), d.values.end()) == 255.0);
    }
    CHECK_CODE(diff_image(a, Frame(8, 4)), ErrorCode::DimensionMismatch);
}

TEST_CASE("block_average") {
    SUBCASE("constant image") {
        const DiffImage d{12, 6, std::vector<double>(72, 7.0)};
        for (std::size_t b : {1, 2, 3, 6}) {
            const auto y = block_average(d, b);
            CHECK(std::all_of(y.values.begin(), y.values.end(), [](double v) { return v == doctest::Approx(7.0); }));
        }
    }
    SUBCASE("480x640 with B = 16 gives a 30x40 grid") {
        const auto y = block_average(DiffImage{640, 480, std::vector<double>(640 * 480, 1.0)}, 16);
        CHECK(y.grid_h == 30);
        CHECK(y.grid_w == 40);
        CHECK(y.size() == 1200);
    }
    SUBCASE("4x4 example, row-major") {
        const DiffImage d{4, 4, {1, 1, 3, 3, 1, 1, 3, 3, 5, 5, 7, 7, 5, 5, 7, 7}};
        CHECK(block_average(d, 2).values == std::vector<double>{1, 3, 5, 7});
    }
    SUBCASE("mass is preserved") {
        SplitMix64 rng(3);
        for (int t = 0; t < 10; ++t) {
            const auto d = random_diff(rng, 40, 30);
            const auto y = block_average(d, 5);
            const double total = std::accumulate(d.values.begin(), d.values.end(), 0.0);
            const double pooled = std::accumulate(y.values.begin(), y.values.end(), 0.0) * 25.0;
            CHECK(pooled == doctest::Approx(total).epsilon(1e-12));
            CHECK(std::abs(pooled - total) <= 1e-6);
        }
    }
    SUBCASE("fused path equals diff then average") {
        SplitMix64 rng(4);
        const Frame a = random_frame(rng, 40, 20), b = random_frame(rng, 40, 20);
        const auto fused = block_average_diff(a, b, 10);
        const auto two_step = block_average(diff_image(a, b), 10);
        REQUIRE(fused.size() == two_step.size());
        for (std::size_t i = 0; i < fused.size(); ++i) CHECK(fused.values[i] == doctest::Approx(two_step.values[i]));
    }
    CHECK_CODE(block_average(DiffImage{10, 10, std::vector<double>(100)}, 3), ErrorCode::BlockSizeError);
    CHECK_CODE(block_average(DiffImage{10, 10, std::vector<double>(100)}, 0), ErrorCode::BlockSizeError);
    CHECK_CODE(block_average_diff(Frame(10, 10), Frame(10, 10), 4), ErrorCode::BlockSizeError);
}

TEST_CASE("make_phi") {
    SUBCASE("entries follow the low bit of the generator") {
        const auto phi = make_phi(3, 5, 99);
        SplitMix64 g(99);
        for (auto e : phi.entries()) CHECK(e == ((g.next() & 1U) ? 1 : -1));
    }
    SUBCASE("codomain and shape at 200x768") {
        const auto phi = make_phi(200, 768, 5);
        CHECK(phi.rows() == 200);
        CHECK(phi.cols() == 768);
        CHECK(std::all_of(phi.entries().begin(), phi.entries().end(), [](std::int8_t e) { return e == 1 || e == -1; }));
        const auto plus = std::count(phi.entries().begin(), phi.entries().end(), std::int8_t{1});
        CHECK(std::abs(double(plus) / (200.0 * 768.0) - 0.5) < 0.01);
    }
    SUBCASE("regeneration is bit-identical") {
        const auto a = make_phi(17, 33, 7), b = make_phi(17, 33, 7), c = make_phi(17, 33, 7);
        CHECK(a == b);
        CHECK(b == c);
        CHECK_FALSE(a == make_phi(17, 33, 8));
    }
    SUBCASE("SplitMix64 reference outputs") {
        // first outputs for seed 0 of the published reference generator
        SplitMix64 g(0);
        CHECK(g.next() == 0xE220A8397B1DCDAFULL);
        CHECK(g.next() == 0x6E789E6AA1B965F4ULL);
        CHECK(g.next() == 0x06C45D188009454FULL);
    }
    CHECK_CODE(make_phi(0, 4, 1), ErrorCode::EmptyMatrix);
    CHECK_CODE(make_phi(4, 0, 1), ErrorCode::EmptyMatrix);
}

TEST_CASE("project") {
    SplitMix64 rng(6);
    SUBCASE("zero input") {
        const auto phi = make_phi(4, 6, 1);
        const auto yh = project(phi, std::vector<double>(6, 0.0));
        CHECK(yh == MeasurementVector(4, 0.0));
    }
    SUBCASE("an all-plus row sums the input") {
        // find a seed whose single 1x5 row is all +1
        std::uint64_t seed = 0;
        while (true) {
            const auto phi = make_phi(1, 5, seed);
            if (std::all_of(phi.entries().begin(), phi.entries().end(), [](std::int8_t e) { return e == 1; })) break;
            ++seed;
        }
        const std::vector<double> y{1.5, 2, 3, 4, 5};
        CHECK(project(make_phi(1, 5, seed), y)[0] == doctest::Approx(15.5));
    }
    SUBCASE("matches a naive product") {
        const auto phi = make_phi(5, 8, 11);
        std::vector<double> y(8);
        for (auto& v : y) v = rng.uniform(0, 255);
        const auto yh = project(phi, y);
        for (std::size_t i = 0; i < 5; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < 8; ++j) s += phi.at(i, j) * y[j];
            CHECK(std::abs(yh[i] - s) <= 1e-12);
        }
    }
    SUBCASE("linear") {
        const auto phi = make_phi(30, 50, 3);
        for (int t = 0; t < 10; ++t) {
            std::vector<double> y1(50), y2(50), mix(50);
            const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
            for (std::size_t j = 0; j < 50; ++j) {
                y1[j] = rng.uniform(0, 255);
                y2[j] = rng.uniform(0, 255);
                mix[j] = a * y1[j] + b * y2[j];
            }
            const auto p1 = project(phi, y1), p2 = project(phi, y2), pm = project(phi, mix);
            for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(pm[i] - (a * p1[i] + b * p2[i])) <= 1e-9);
        }
    }
    CHECK_CODE(project(make_phi(3, 4, 1), std::vector<double>(5)), ErrorCode::DimensionMismatch);
}
