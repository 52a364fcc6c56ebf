#include "csgesture/stream.hpp"

#include <memory>

#include "csgesture/error.hpp"

namespace csg {

StreamRecognizer::StreamRecognizer(const GestureModel& model, const Extractor& extractor)
    : model_(model), extractor_(extractor) {
    const auto& a = model.config;
    const auto& b = extractor.config();
    if (a.frame_width != b.frame_width || a.frame_height != b.frame_height || a.block != b.block ||
        a.measurements != b.measurements || a.phi_seed != b.phi_seed)
        fail(ErrorCode::ConfigError, "extractor configuration does not match the model");
}

void StreamRecognizer::reset() {
    previous_.reset();
    fifo_.clear();
    frames_ = 0;
    active_ = 0;
    quiet_ = 0;
}

RecognitionEvent StreamRecognizer::fire(std::size_t frame) {
    const CenterSeq snapshot(fifo_.begin(), fifo_.end());
    const auto rec = recognize(model_, snapshot, model_.config.open_ended);
    RecognitionEvent ev;
    ev.frame = frame;
    ev.verdict = rec.verdict;
    ev.window_start = rec.rescaled.start;
    ev.window_end = rec.rescaled.end;
    ev.buffer_size = snapshot.size();
    ev.embedding.assign(rec.embedding.data(), rec.embedding.data() + rec.embedding.size());
    if (model_.config.clear_after_event) fifo_.clear();
    active_ = 0;
    return ev;
}

StreamRecognizer::Step StreamRecognizer::push(const Frame& frame) {
    const auto& cfg = model_.config;
    if (frame.width != cfg.frame_width || frame.height != cfg.frame_height)
        fail(ErrorCode::DimensionMismatch, "stream frame is " + std::to_string(frame.width) + "x" +
                                               std::to_string(frame.height) + ", model expects " +
                                               std::to_string(cfg.frame_width) + "x" + std::to_string(cfg.frame_height));
    Step step;
    step.frame = frames_++;
    if (!previous_) {
        previous_ = frame;
        return step;
    }

    step.center = extractor_.process(*previous_, frame);
    previous_ = frame;

    if (step.center) {
        step.normalized = extractor_.normalize(*step.center);
        fifo_.push_back(*step.normalized);
        if (fifo_.size() > cfg.fifo_length) fifo_.pop_front();
        ++active_;
        quiet_ = 0;
        if (cfg.classify_every_frame && active_ >= cfg.gate_min_active) {
            const auto keep = active_;
            step.event = fire(step.frame);
            active_ = keep;
        }
        return step;
    }

    if (++quiet_ == cfg.gate_quiet) {
        if (!cfg.classify_every_frame && active_ >= cfg.gate_min_active && !fifo_.empty()) {
            step.event = fire(step.frame);
        } else if (cfg.clear_after_event) {
            fifo_.clear();  // too short to be a gesture
        }
        active_ = 0;
    }
    return step;
}

std::vector<RecognitionEvent> run_stream(const FrameSource& source, const GestureModel& model,
                                         const Extractor& extractor, const EventSink& sink) {
    StreamRecognizer rec(model, extractor);
    std::vector<RecognitionEvent> events;
    while (true) {
        std::optional<Frame> frame;
        try {
            frame = source();
        } catch (const std::exception& e) {
            fail(ErrorCode::StreamError, "frame source failed after " + std::to_string(rec.frames_seen()) + " frames (" +
                                             std::to_string(events.size()) + " events emitted): " + e.what());
        }
        if (!frame) break;
        auto step = rec.push(*frame);
        if (step.event) events.push_back(*step.event);
        if (sink) sink(step);
    }
    return events;
}

FrameSource directory_source(const std::filesystem::path& dir) {
    auto files = std::make_shared<std::vector<std::filesystem::path>>(list_frame_files(dir));
    auto next = std::make_shared<std::size_t>(0);
    return [files, next]() -> std::optional<Frame> {
        if (*next >= files->size()) return std::nullopt;
        return read_pgm((*files)[(*next)++]);
    };
}

FrameSource vector_source(const std::vector<Frame>& frames) {
    auto next = std::make_shared<std::size_t>(0);
    return [&frames, next]() -> std::optional<Frame> {
        if (*next >= frames.size()) return std::nullopt;
        return frames[(*next)++];
    };
}

}  // namespace csg
