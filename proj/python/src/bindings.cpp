#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csgesture/config.hpp"
#include "csgesture/error.hpp"
#include "csgesture/pipeline.hpp"
#include "csgesture/stream.hpp"
#include "csgesture/synth.hpp"
#include "csgesture/tseries.hpp"

namespace py = pybind11;
using namespace csg;

namespace {

using Points = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Pixels = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

CenterSeq to_seq(const Points& a) {
    if (a.ndim() != 2 || a.shape(1) != 2) throw py::value_error("expected an (n, 2) array of points");
    CenterSeq s(static_cast<std::size_t>(a.shape(0)));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i) s[std::size_t(i)] = {r(i, 0), r(i, 1)};
    return s;
}

Points from_seq(const CenterSeq& s) {
    Points a({py::ssize_t(s.size()), py::ssize_t(2)});
    auto w = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < s.size(); ++i) {
        w(py::ssize_t(i), 0) = s[i].x;
        w(py::ssize_t(i), 1) = s[i].y;
    }
    return a;
}

Frame to_frame(const Pixels& a) {
    if (a.ndim() != 2) throw py::value_error("expected a (height, width) uint8 array");
    const auto* p = a.data();
    return Frame(std::size_t(a.shape(1)), std::size_t(a.shape(0)), std::vector<std::uint8_t>(p, p + a.size()));
}

Pixels from_frame(const Frame& f) {
    Pixels a({py::ssize_t(f.height), py::ssize_t(f.width)});
    std::copy(f.pixels.begin(), f.pixels.end(), a.mutable_data());
    return a;
}

std::vector<Frame> to_frames(const std::vector<Pixels>& frames) {
    std::vector<Frame> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(to_frame(f));
    return out;
}

std::vector<LabeledSequence> to_dataset(const std::vector<std::pair<std::string, Points>>& data) {
    std::vector<LabeledSequence> out;
    for (const auto& [label, pts] : data) out.push_back({label, to_seq(pts)});
    return out;
}

py::dict verdict_dict(const Verdict& v) {
    py::dict d;
    d["accepted"] = v.accepted;
    d["label"] = v.accepted ? py::object(py::str(v.label)) : py::object(py::none());
    d["class_index"] = v.class_index;
    d["mahalanobis2"] = v.mahalanobis2;
    d["log_likelihood"] = v.log_likelihood;
    return d;
}

GestureClass gesture_class(const std::string& label) {
    const auto cls = parse_gesture_class(label);
    if (!cls) throw Error(ErrorCode::UnknownLabel, "no synthetic gesture '" + label + "'");
    return *cls;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Compressed-domain gesture recognition";

    static PyObject* error_type = PyErr_NewException("csgesture._core.CsgError", PyExc_RuntimeError, nullptr);
    m.attr("CsgError") = py::handle(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    py::class_<PipelineConfig>(m, "Config")
        .def(py::init([](const std::string& text) {
                 auto c = parse_config(text);
                 c.validate();
                 return c;
             }),
             py::arg("text") = "")
        .def("to_text", [](const PipelineConfig& c) { return to_config_text(c); })
        .def("to_json", [](const PipelineConfig& c) { return to_json(c).dump(); })
        .def_readonly("frame_width", &PipelineConfig::frame_width)
        .def_readonly("frame_height", &PipelineConfig::frame_height)
        .def_readonly("block", &PipelineConfig::block)
        .def_readonly("measurements", &PipelineConfig::measurements)
        .def_property_readonly("cells", &PipelineConfig::cells);

    py::class_<Extractor>(m, "Extractor")
        .def(py::init<const PipelineConfig&>())
        .def_property_readonly("compressed", &Extractor::compressed)
        .def_property_readonly("templates", [](const Extractor& e) { return e.bank().size(); })
        .def(
            "center",
            [](const Extractor& e, const Pixels& prev, const Pixels& next) -> py::object {
                const auto c = e.process(to_frame(prev), to_frame(next));
                if (!c) return py::none();
                const auto n = e.normalize(*c);
                py::dict d;
                d["x"] = n.x;
                d["y"] = n.y;
                d["block_x"] = c->x;
                d["block_y"] = c->y;
                d["r"] = c->r;
                d["score"] = c->score;
                return d;
            },
            py::arg("prev"), py::arg("next"), "Motion center of one frame pair, or None when nothing moved.")
        .def(
            "extract",
            [](const Extractor& e, const std::vector<Pixels>& frames) {
                return from_seq(extract_sequence(to_frames(frames), e).points());
            },
            py::arg("frames"), "Normalized motion centers of a frame sequence.");

    m.def(
        "synth_gesture",
        [](const std::string& label, std::size_t index, std::uint64_t seed, std::size_t width, std::size_t height,
           std::size_t rect_pixels) {
            DatasetOptions opts;
            opts.width = width;
            opts.height = height;
            opts.render.rect_pixels = rect_pixels;
            const auto s = make_gesture_sample(gesture_class(label), index, seed, opts);
            py::list frames;
            for (const auto& f : s.frames) frames.append(from_frame(f));
            return frames;
        },
        py::arg("label"), py::arg("index"), py::arg("seed") = 2016, py::arg("width") = 640, py::arg("height") = 480,
        py::arg("rect_pixels") = 64, "Rendered frames of one synthetic gesture ('+', 'O', 'N', 'X' or 'Z').");

    m.def(
        "dtw",
        [](const Points& a, const Points& b) {
            const auto r = dtw(to_seq(a), to_seq(b));
            return py::make_tuple(r.distance, r.path);
        },
        py::arg("a"), py::arg("b"), "Distance and 0-based warping path.");
    m.def(
        "dtw_open_end",
        [](const Points& buffer, const Points& templ) {
            const auto r = dtw_open_end(to_seq(buffer), to_seq(templ));
            return py::make_tuple(r.distance, r.start, r.end);
        },
        py::arg("buffer"), py::arg("template"));

    py::class_<GestureModel>(m, "Model")
        .def_property_readonly("labels", [](const GestureModel& g) { return g.labels; })
        .def_property_readonly("tau", &GestureModel::tau)
        .def_property_readonly("config", [](const GestureModel& g) { return g.config; })
        .def_property_readonly("supers",
                               [](const GestureModel& g) {
                                   py::list out;
                                   for (const auto& s : g.supers) out.append(py::make_tuple(s.label, from_seq(s.points)));
                                   return out;
                               })
        .def("save", [](const GestureModel& g, const std::string& path) { save_model(g, path); })
        .def("dumps", [](const GestureModel& g) { return serialize_model(g); })
        .def_static("load", [](const std::string& path) { return load_model(path); })
        .def_static("loads", [](const std::string& text) { return deserialize_model(text); })
        .def(
            "recognize",
            [](const GestureModel& g, const Points& seq, bool open_ended) {
                const auto r = recognize(g, to_seq(seq), open_ended);
                auto d = verdict_dict(r.verdict);
                d["embedding"] = std::vector<double>(r.embedding.data(), r.embedding.data() + r.embedding.size());
                return d;
            },
            py::arg("centers"), py::arg("open_ended") = false)
        .def(
            "evaluate",
            [](const GestureModel& g, const std::vector<std::pair<std::string, Points>>& test,
               const std::vector<Points>& unspecified) {
                std::vector<CenterSeq> u;
                for (const auto& p : unspecified) u.push_back(to_seq(p));
                const auto rep = evaluate(g, to_dataset(test), u);
                return py::make_tuple(rep.to_json().dump(), rep.table());
            },
            py::arg("test"), py::arg("unspecified") = std::vector<Points>{},
            "Report as (json text, table text).");

    m.def(
        "train",
        [](const std::vector<std::pair<std::string, Points>>& data, const PipelineConfig& cfg) {
            return train(to_dataset(data), cfg);
        },
        py::arg("dataset"), py::arg("config"), "Train from (label, centers) pairs.");

    m.def(
        "stream",
        [](const GestureModel& g, const Extractor& e, const std::vector<Pixels>& frames) {
            const auto events = run_stream(vector_source(to_frames(frames)), g, e);
            py::list out;
            for (const auto& ev : events) {
                auto d = verdict_dict(ev.verdict);
                d["frame"] = ev.frame;
                d["window"] = py::make_tuple(ev.window_start, ev.window_end);
                d["embedding"] = ev.embedding;
                out.append(d);
            }
            return out;
        },
        py::arg("model"), py::arg("extractor"), py::arg("frames"), "Recognition events of a frame stream.");
}
