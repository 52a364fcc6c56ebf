#include "csgesture/server.hpp"

#include <mutex>
#include <string_view>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/core/detail/base64.hpp>
#include <boost/beast/websocket.hpp>

#include "csgesture/error.hpp"

namespace csg {

namespace beast = boost::beast;
namespace net = boost::asio;
using tcp = net::ip::tcp;

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out(beast::detail::base64::encoded_size(bytes.size()), '\0');
    out.resize(beast::detail::base64::encode(out.data(), bytes.data(), bytes.size()));
    return out;
}

// Strict RFC 4648 decoding: padded to a multiple of 4, no whitespace.
std::vector<std::uint8_t> base64_decode(const std::string& text) {
    static constexpr std::string_view alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    if (text.size() % 4 != 0) fail(ErrorCode::ParseError, "invalid base64 payload length");
    std::size_t body = text.size();
    for (int k = 0; k < 2 && body > 0 && text[body - 1] == '='; ++k) --body;
    if (body % 4 == 1) fail(ErrorCode::ParseError, "invalid base64 padding");

    std::vector<std::uint8_t> out;
    out.reserve(body * 3 / 4);
    std::uint32_t acc = 0;
    int bits = 0;
    for (std::size_t i = 0; i < body; ++i) {
        const auto v = alphabet.find(text[i]);
        if (v == std::string_view::npos) fail(ErrorCode::ParseError, "invalid base64 character");
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>(acc >> bits));
            acc &= (1u << bits) - 1;
        }
    }
    return out;
}

nlohmann::json center_message(std::int64_t seq, const MotionCenter& c, const Point2& normalized) {
    return {{"type", "center"}, {"seq", seq}, {"x", normalized.x}, {"y", normalized.y}, {"r", c.r}, {"score", c.score}};
}

nlohmann::json event_message(std::int64_t frame_seq, const RecognitionEvent& ev) {
    return {{"type", "event"},
            {"frame", frame_seq},
            {"label", ev.verdict.accepted ? ev.verdict.label : std::string("reject")},
            {"mahalanobis", ev.verdict.mahalanobis2},
            {"window", {ev.window_start, ev.window_end}},
            {"embedding", ev.embedding}};
}

namespace {

nlohmann::json error_message(const std::string& what) { return {{"type", "error"}, {"message", what}}; }

}  // namespace

WireSession::WireSession(const GestureModel& model, const Extractor& extractor) : model_(model), extractor_(extractor) {}

std::vector<nlohmann::json> WireSession::handle(const std::string& message) {
    nlohmann::json msg;
    try {
        msg = nlohmann::json::parse(message);
    } catch (const nlohmann::json::exception&) {
        return {error_message("malformed JSON message")};
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
        return {error_message("message has no type")};

    const auto type = msg["type"].get<std::string>();
    try {
        if (type == "init") {
            const auto w = msg.at("width").get<std::size_t>();
            const auto h = msg.at("height").get<std::size_t>();
            if (w != model_.config.frame_width || h != model_.config.frame_height)
                return {error_message("frame size " + std::to_string(w) + "x" + std::to_string(h) + " does not match model (" +
                                      std::to_string(model_.config.frame_width) + "x" +
                                      std::to_string(model_.config.frame_height) + ")")};
            recognizer_.emplace(model_, extractor_);
            last_seq_.reset();
            return {};
        }
        if (type == "frame") return on_frame(msg);
    } catch (const nlohmann::json::exception& e) {
        return {error_message(std::string("bad ") + type + " message: " + e.what())};
    } catch (const Error& e) {
        return {error_message(e.what())};
    }
    return {error_message("unknown message type '" + type + "'")};
}

std::vector<nlohmann::json> WireSession::on_frame(const nlohmann::json& msg) {
    if (!recognizer_) return {error_message("frame received before init")};
    const auto seq = msg.at("seq").get<std::int64_t>();
    if (last_seq_ && seq <= *last_seq_)
        return {error_message("frame seq " + std::to_string(seq) + " is not newer than " + std::to_string(*last_seq_))};
    auto pixels = base64_decode(msg.at("pixels").get<std::string>());
    const auto& cfg = model_.config;
    if (pixels.size() != cfg.frame_width * cfg.frame_height)
        return {error_message("frame payload has " + std::to_string(pixels.size()) + " bytes, expected " +
                              std::to_string(cfg.frame_width * cfg.frame_height))};
    last_seq_ = seq;

    const auto step = recognizer_->push(Frame(cfg.frame_width, cfg.frame_height, std::move(pixels)));
    std::vector<nlohmann::json> out;
    if (step.center) out.push_back(center_message(seq, *step.center, *step.normalized));
    if (step.event) out.push_back(event_message(seq, *step.event));
    return out;
}

struct WsServer::Impl {
    const GestureModel& model;
    Extractor extractor;
    net::io_context ioc{1};
    tcp::acceptor acceptor;
    std::thread io_thread;

    std::mutex mu;
    bool stopped = false;
    std::vector<std::thread> sessions;
    std::vector<std::weak_ptr<beast::websocket::stream<tcp::socket>>> streams;

    Impl(const GestureModel& m, const std::string& address, std::uint16_t port)
        : model(m), extractor(m.config), acceptor(ioc, tcp::endpoint(net::ip::make_address(address), port)) {}

    void accept_next() {
        acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            auto ws = std::make_shared<beast::websocket::stream<tcp::socket>>(std::move(socket));
            {
                std::lock_guard lock(mu);
                if (stopped) return;
                streams.push_back(ws);
                sessions.emplace_back([this, ws] { serve(ws); });
            }
            accept_next();
        });
    }

    void serve(const std::shared_ptr<beast::websocket::stream<tcp::socket>>& ws) {
        try {
            ws->accept();
            ws->text(true);
            WireSession session(model, extractor);
            beast::flat_buffer buffer;
            while (true) {
                buffer.clear();
                ws->read(buffer);
                for (const auto& reply : session.handle(beast::buffers_to_string(buffer.data())))
                    ws->write(net::buffer(reply.dump()));
            }
        } catch (const std::exception&) {
            // closed by the peer or by stop()
        }
    }
};

WsServer::WsServer(const GestureModel& model, const std::string& address, std::uint16_t port)
    : impl_(std::make_unique<Impl>(model, address, port)) {}

WsServer::~WsServer() { stop(); }

std::uint16_t WsServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WsServer::start() {
    impl_->accept_next();
    impl_->io_thread = std::thread([this] { impl_->ioc.run(); });
}

void WsServer::stop() {
    std::vector<std::thread> sessions;
    {
        std::lock_guard lock(impl_->mu);
        if (impl_->stopped) return;
        impl_->stopped = true;
        for (auto& weak : impl_->streams) {
            if (auto ws = weak.lock()) {
                beast::error_code ec;
                beast::get_lowest_layer(*ws).shutdown(tcp::socket::shutdown_both, ec);
            }
        }
        sessions.swap(impl_->sessions);
    }
    net::post(impl_->ioc, [this] {
        beast::error_code ec;
        impl_->acceptor.close(ec);
    });
    impl_->ioc.stop();
    if (impl_->io_thread.joinable()) impl_->io_thread.join();
    for (auto& t : sessions)
        if (t.joinable()) t.join();
}

}  // namespace csg
