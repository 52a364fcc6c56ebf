#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "csgesture/pipeline.hpp"

namespace csg {

struct RecognitionEvent {
    std::size_t frame = 0;  // index of the frame that closed the gesture
    Verdict verdict;
    std::size_t window_start = 0;  // matched window inside the buffer snapshot, inclusive
    std::size_t window_end = 0;
    std::size_t buffer_size = 0;
    std::vector<double> embedding;
};

/// Single-owner streaming recognizer: one FIFO of motion centers fed frame by frame.
/// The model and extractor are borrowed and must outlive the recognizer.
class StreamRecognizer {
public:
    StreamRecognizer(const GestureModel& model, const Extractor& extractor);

    struct Step {
        std::size_t frame = 0;
        std::optional<MotionCenter> center;
        std::optional<Point2> normalized;
        std::optional<RecognitionEvent> event;
    };

    Step push(const Frame& frame);

    const std::deque<Point2>& buffer() const { return fifo_; }
    std::size_t frames_seen() const { return frames_; }
    void reset();

private:
    RecognitionEvent fire(std::size_t frame);

    const GestureModel& model_;
    const Extractor& extractor_;
    std::optional<Frame> previous_;
    std::deque<Point2> fifo_;
    std::size_t frames_ = 0;
    std::size_t active_ = 0;  // active frames since the last event or quiet reset
    std::size_t quiet_ = 0;
};

using FrameSource = std::function<std::optional<Frame>()>;
using EventSink = std::function<void(const StreamRecognizer::Step&)>;

/// Drains `source` through a fresh recognizer, calling `sink` for every frame.
/// A throwing source ends the stream with StreamError after earlier steps were delivered.
std::vector<RecognitionEvent> run_stream(const FrameSource& source, const GestureModel& model,
                                         const Extractor& extractor, const EventSink& sink = {});

/// Lazily reads the sorted *.pgm files of a directory.
FrameSource directory_source(const std::filesystem::path& dir);

/// Serves frames from memory.
FrameSource vector_source(const std::vector<Frame>& frames);

}  // namespace csg
