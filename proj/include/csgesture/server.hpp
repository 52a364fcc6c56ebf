#pragma once

// WebSocket front end: one StreamRecognizer per connection, JSON text messages.

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csgesture/stream.hpp"

namespace csg {

/// Protocol state machine of one connection, independent of the transport.
///   client: {"type":"init","width":W,"height":H}
///           {"type":"frame","seq":n,"pixels":"<base64 row-major 8-bit>"}
///   server: {"type":"center","seq":n,"x":..,"y":..,"r":..,"score":..}   (frames with motion)
///           {"type":"event","frame":n,"label":"Z"|"reject","mahalanobis":..,"window":[s,e],"embedding":[..]}
///           {"type":"error","message":".."}
class WireSession {
public:
    WireSession(const GestureModel& model, const Extractor& extractor);

    /// Replies to one client message, in order.
    std::vector<nlohmann::json> handle(const std::string& message);

private:
    std::vector<nlohmann::json> on_frame(const nlohmann::json& msg);

    const GestureModel& model_;
    const Extractor& extractor_;
    std::optional<StreamRecognizer> recognizer_;
    std::optional<std::int64_t> last_seq_;
};

nlohmann::json center_message(std::int64_t seq, const MotionCenter& c, const Point2& normalized);
nlohmann::json event_message(std::int64_t frame_seq, const RecognitionEvent& ev);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// Accepts WebSocket connections on a background thread; each connection gets its
/// own WireSession handled on a dedicated thread.
class WsServer {
public:
    WsServer(const GestureModel& model, const std::string& address, std::uint16_t port);
    ~WsServer();

    WsServer(const WsServer&) = delete;
    WsServer& operator=(const WsServer&) = delete;

    std::uint16_t port() const;
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace csg
