#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "csgesture/server.hpp"
#include "csgesture/synth.hpp"
#include "fixture.hpp"
#include "helpers.hpp"

using namespace csg;
using nlohmann::json;

namespace {

std::string frame_message(std::int64_t seq, const Frame& f) {
    return json{{"type", "frame"}, {"seq", seq}, {"pixels", base64_encode(f.pixels)}}.dump();
}

std::string init_message(std::size_t w, std::size_t h) { return json{{"type", "init"}, {"width", w}, {"height", h}}.dump(); }

bool is_error(const std::vector<json>& replies) { return replies.size() == 1 && replies[0]["type"] == "error"; }

std::vector<Frame> demo_frames() {
    auto frames = fixture::padded(make_gesture_sample(GestureClass::Z, 3, 55, fixture::small_dataset()).frames, 4, 8);
    const auto second = fixture::padded(make_gesture_sample(GestureClass::Plus, 4, 55, fixture::small_dataset()).frames, 4, 8);
    frames.insert(frames.end(), second.begin(), second.end());
    return frames;
}

// What the wire should say for `frames`, from the offline recognizer.
std::vector<json> expected_replies(const std::vector<Frame>& frames) {
    const auto& t = fixture::trained();
    std::vector<json> out;
    StreamRecognizer rec(t.model, t.extractor);
    for (const auto& f : frames) {
        const auto step = rec.push(f);
        const auto seq = static_cast<std::int64_t>(step.frame);
        if (step.center) out.push_back(center_message(seq, *step.center, *step.normalized));
        if (step.event) out.push_back(event_message(seq, *step.event));
    }
    return out;
}

}  // namespace

TEST_CASE("base64") {
    CHECK(base64_encode({}) == "");
    CHECK(base64_encode({'f'}) == "Zg==");
    CHECK(base64_encode({'f', 'o'}) == "Zm8=");
    CHECK(base64_encode({'f', 'o', 'o', 'b', 'a', 'r'}) == "Zm9vYmFy");
    std::vector<std::uint8_t> all(256);
    for (int i = 0; i < 256; ++i) all[std::size_t(i)] = std::uint8_t(i);
    for (std::size_t n = 0; n <= all.size(); n += 17) {
        const std::vector<std::uint8_t> part(all.begin(), all.begin() + std::ptrdiff_t(n));
        CHECK(base64_decode(base64_encode(part)) == part);
    }
    CHECK_CODE(base64_decode("Zm9v!"), ErrorCode::ParseError);
    CHECK_CODE(base64_decode("Zm9"), ErrorCode::ParseError);
}

TEST_CASE("wire session protocol") {
    const auto& t = fixture::trained();
    WireSession s(t.model, t.extractor);
    const Frame blank(320, 240);

    CHECK(is_error(s.handle(frame_message(0, blank))));
    CHECK(is_error(s.handle(init_message(640, 480))));
    CHECK(is_error(s.handle("{not json")));
    CHECK(is_error(s.handle(R"({"seq": 1})")));
    CHECK(is_error(s.handle(R"({"type": "hello"})")));
    CHECK(is_error(s.handle(R"({"type": "init", "width": "wide"})")));

    CHECK(s.handle(init_message(320, 240)).empty());
    CHECK(s.handle(frame_message(5, blank)).empty());
    CHECK(is_error(s.handle(frame_message(5, blank))));
    CHECK(is_error(s.handle(frame_message(4, blank))));
    CHECK(is_error(s.handle(frame_message(6, Frame(32, 24)))));
    CHECK(is_error(s.handle(json{{"type", "frame"}, {"seq", 7}, {"pixels", "@@@"}}.dump())));
    CHECK(is_error(s.handle(json{{"type", "frame"}, {"seq", 8}}.dump())));
    CHECK(s.handle(frame_message(9, blank)).empty());

    SUBCASE("replies match the offline recognizer") {
        WireSession w(t.model, t.extractor);
        w.handle(init_message(320, 240));
        const auto frames = demo_frames();
        std::vector<json> got;
        for (std::size_t k = 0; k < frames.size(); ++k)
            for (auto& r : w.handle(frame_message(std::int64_t(k), frames[k]))) got.push_back(std::move(r));
        const auto want = expected_replies(frames);
        CHECK(got == want);
        std::size_t events = 0;
        for (const auto& r : got) events += r["type"] == "event";
        CHECK(events == 2);
    }
    SUBCASE("init resets the stream") {
        WireSession w(t.model, t.extractor);
        w.handle(init_message(320, 240));
        w.handle(frame_message(100, blank));
        w.handle(init_message(320, 240));
        CHECK(w.handle(frame_message(0, blank)).empty());
    }
}

TEST_CASE("websocket round trip") {
    namespace beast = boost::beast;
    namespace net = boost::asio;
    using tcp = net::ip::tcp;

    const auto& t = fixture::trained();
    WsServer server(t.model, "127.0.0.1", 0);
    server.start();
    REQUIRE(server.port() != 0);

    net::io_context ioc;
    tcp::resolver resolver(ioc);
    beast::websocket::stream<tcp::socket> ws(ioc);
    net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
    ws.handshake("127.0.0.1", "/");
    ws.text(true);

    const auto frames = demo_frames();
    const auto want = expected_replies(frames);

    ws.write(net::buffer(init_message(320, 240)));
    for (std::size_t k = 0; k < frames.size(); ++k) ws.write(net::buffer(frame_message(std::int64_t(k), frames[k])));
    // an error reply marks the end of our replies
    ws.write(net::buffer(std::string(R"({"type": "bye"})")));

    std::vector<json> got;
    for (;;) {
        beast::flat_buffer buf;
        ws.read(buf);
        auto msg = json::parse(beast::buffers_to_string(buf.data()));
        if (msg["type"] == "error") break;
        got.push_back(std::move(msg));
    }
    CHECK(got.size() == want.size());
    CHECK(got == want);

    ws.close(beast::websocket::close_code::normal);
    server.stop();
}
