#pragma once

// Small synthetic recognition problem shared by the pipeline and server tests:
// 320x240 frames, B = 10 (32x24 grid), M = 200, five classes.

#include <vector>

#include "csgesture/pipeline.hpp"
#include "csgesture/synth.hpp"

namespace fixture {

inline csg::PipelineConfig small_config() {
    csg::PipelineConfig cfg;
    cfg.frame_width = 320;
    cfg.frame_height = 240;
    cfg.block = 10;
    cfg.measurements = 200;
    return cfg;
}

inline csg::DatasetOptions small_dataset() {
    csg::DatasetOptions d;
    d.width = 320;
    d.height = 240;
    d.render.rect_pixels = 32;
    return d;
}

struct Trained {
    csg::PipelineConfig cfg;
    csg::Extractor extractor;
    std::vector<csg::LabeledSequence> train;
    std::vector<csg::LabeledSequence> test;
    csg::GestureModel model;
};

inline const Trained& trained() {
    static const Trained t = [] {
        const auto cfg = small_config();
        csg::Extractor ex(cfg);
        std::vector<csg::LabeledSequence> train, test;
        std::size_t index = 0;
        for (auto cls : csg::kAllGestureClasses)
            for (std::size_t i = 0; i < 14; ++i) {
                const auto s = csg::make_gesture_sample(cls, index++, 99, small_dataset());
                (i < 10 ? train : test).push_back({s.label, csg::extract_sequence(s.frames, ex).points()});
            }
        auto model = csg::train(train, cfg);
        return Trained{cfg, std::move(ex), std::move(train), std::move(test), std::move(model)};
    }();
    return t;
}

/// `lead` static frames, the gesture, then `tail` copies of its last frame.
inline std::vector<csg::Frame> padded(const std::vector<csg::Frame>& gesture, std::size_t lead, std::size_t tail) {
    std::vector<csg::Frame> out(lead, gesture.front());
    out.insert(out.end(), gesture.begin(), gesture.end());
    out.insert(out.end(), tail, gesture.back());
    return out;
}

}  // namespace fixture
