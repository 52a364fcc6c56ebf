#include "csgesture/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "csgesture/error.hpp"
#include "csgesture/motion.hpp"

namespace csg {

double PipelineConfig::activity_threshold_value() const {
    return activity_threshold.value_or(default_activity_threshold(cells()));
}

double PipelineConfig::compressed_threshold_value() const {
    if (compressed_threshold) return *compressed_threshold;
    return default_compressed_threshold(activity_threshold_value(), measurements);
}

void PipelineConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) fail(ErrorCode::ConfigError, msg);
    };
    require(frame_width > 0 && frame_height > 0, "frame dimensions must be positive");
    require(block > 0, "block size must be positive");
    require(frame_width % block == 0 && frame_height % block == 0,
            "block size " + std::to_string(block) + " must divide " + std::to_string(frame_width) + "x" +
                std::to_string(frame_height));
    require(!template_sizes.empty(), "template_sizes is empty");
    for (auto r : template_sizes)
        require(r > 0 && r <= std::min(grid_w(), grid_h()), "template size " + std::to_string(r) + " exceeds the grid");
    require(!tau || *tau >= 2, "tau must be at least 2");
    require(clusters_per_class > 0, "clusters_per_class must be positive");
    require(pca_dims > 0, "pca_dims must be positive");
    require(chi2_threshold > 0, "chi2_threshold must be positive");
    require(fifo_length > 0, "fifo_length must be positive");
    require(!tau || 2 * fifo_length >= *tau, "fifo_length must be at least tau/2");
    require(gate_min_active > 0 && gate_quiet > 0, "gate counts must be positive");
    require(kmeans_max_iter > 0, "kmeans_max_iter must be positive");
    require(dba_tol >= 0, "dba_tol must be non-negative");
}

namespace {

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        fail(ErrorCode::ConfigError, "bad value '" + value + "' for " + key);
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    fail(ErrorCode::ConfigError, "bad boolean '" + value + "' for " + key);
}

bool is_auto(const std::string& value) { return value == "auto" || value.empty(); }

using Setter = std::function<void(PipelineConfig&, const std::string& key, const std::string& value)>;

template <typename T>
Setter number(T PipelineConfig::*field) {
    return [field](PipelineConfig& c, const std::string& k, const std::string& v) { c.*field = parse_number<T>(k, v); };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"frame_width", number(&PipelineConfig::frame_width)},
        {"frame_height", number(&PipelineConfig::frame_height)},
        {"block", number(&PipelineConfig::block)},
        {"measurements", number(&PipelineConfig::measurements)},
        {"phi_seed", number(&PipelineConfig::phi_seed)},
        {"template_sizes",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             c.template_sizes.clear();
             std::stringstream ss(v);
             std::string item;
             while (std::getline(ss, item, ',')) c.template_sizes.push_back(parse_number<std::size_t>(k, trim(item)));
         }},
        {"activity_threshold",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             c.activity_threshold = is_auto(v) ? std::nullopt : std::optional(parse_number<double>(k, v));
         }},
        {"compressed_threshold",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             c.compressed_threshold = is_auto(v) ? std::nullopt : std::optional(parse_number<double>(k, v));
         }},
        {"tau",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             c.tau = is_auto(v) ? std::nullopt : std::optional(parse_number<std::size_t>(k, v));
         }},
        {"clusters_per_class", number(&PipelineConfig::clusters_per_class)},
        {"kmeans_seed", number(&PipelineConfig::kmeans_seed)},
        {"kmeans_max_iter", number(&PipelineConfig::kmeans_max_iter)},
        {"dba_max_iter", number(&PipelineConfig::dba_max_iter)},
        {"dba_tol", number(&PipelineConfig::dba_tol)},
        {"pca_dims", number(&PipelineConfig::pca_dims)},
        {"chi2_threshold", number(&PipelineConfig::chi2_threshold)},
        {"fifo_length", number(&PipelineConfig::fifo_length)},
        {"gate_min_active", number(&PipelineConfig::gate_min_active)},
        {"gate_quiet", number(&PipelineConfig::gate_quiet)},
        {"open_ended", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.open_ended = parse_bool(k, v); }},
        {"clear_after_event",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.clear_after_event = parse_bool(k, v); }},
        {"classify_every_frame",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.classify_every_frame = parse_bool(k, v); }},
    };
    return table;
}

}  // namespace

PipelineConfig parse_config(const std::string& text, PipelineConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) fail(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(base, key, value);
    }
    return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string to_config_text(const PipelineConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    auto opt = [](const auto& v) {
        std::ostringstream s;
        s.precision(17);
        if (v) s << *v; else s << "auto";
        return s.str();
    };
    out << "frame_width = " << cfg.frame_width << '\n'
        << "frame_height = " << cfg.frame_height << '\n'
        << "block = " << cfg.block << '\n'
        << "measurements = " << cfg.measurements << '\n'
        << "phi_seed = " << cfg.phi_seed << '\n'
        << "template_sizes = ";
    for (std::size_t i = 0; i < cfg.template_sizes.size(); ++i) out << (i ? "," : "") << cfg.template_sizes[i];
    out << '\n'
        << "activity_threshold = " << opt(cfg.activity_threshold) << '\n'
        << "compressed_threshold = " << opt(cfg.compressed_threshold) << '\n'
        << "tau = " << opt(cfg.tau) << '\n'
        << "clusters_per_class = " << cfg.clusters_per_class << '\n'
        << "kmeans_seed = " << cfg.kmeans_seed << '\n'
        << "kmeans_max_iter = " << cfg.kmeans_max_iter << '\n'
        << "dba_max_iter = " << cfg.dba_max_iter << '\n'
        << "dba_tol = " << cfg.dba_tol << '\n'
        << "pca_dims = " << cfg.pca_dims << '\n'
        << "chi2_threshold = " << cfg.chi2_threshold << '\n'
        << "fifo_length = " << cfg.fifo_length << '\n'
        << "gate_min_active = " << cfg.gate_min_active << '\n'
        << "gate_quiet = " << cfg.gate_quiet << '\n'
        << "open_ended = " << (cfg.open_ended ? "true" : "false") << '\n'
        << "clear_after_event = " << (cfg.clear_after_event ? "true" : "false") << '\n'
        << "classify_every_frame = " << (cfg.classify_every_frame ? "true" : "false") << '\n';
    return out.str();
}

nlohmann::json to_json(const PipelineConfig& cfg) {
    nlohmann::json j;
    j["frame_width"] = cfg.frame_width;
    j["frame_height"] = cfg.frame_height;
    j["block"] = cfg.block;
    j["measurements"] = cfg.measurements;
    j["phi_seed"] = cfg.phi_seed;
    j["template_sizes"] = cfg.template_sizes;
    j["activity_threshold"] = cfg.activity_threshold ? nlohmann::json(*cfg.activity_threshold) : nlohmann::json(nullptr);
    j["compressed_threshold"] =
        cfg.compressed_threshold ? nlohmann::json(*cfg.compressed_threshold) : nlohmann::json(nullptr);
    j["tau"] = cfg.tau ? nlohmann::json(*cfg.tau) : nlohmann::json(nullptr);
    j["clusters_per_class"] = cfg.clusters_per_class;
    j["kmeans_seed"] = cfg.kmeans_seed;
    j["kmeans_max_iter"] = cfg.kmeans_max_iter;
    j["dba_max_iter"] = cfg.dba_max_iter;
    j["dba_tol"] = cfg.dba_tol;
    j["pca_dims"] = cfg.pca_dims;
    j["chi2_threshold"] = cfg.chi2_threshold;
    j["fifo_length"] = cfg.fifo_length;
    j["gate_min_active"] = cfg.gate_min_active;
    j["gate_quiet"] = cfg.gate_quiet;
    j["open_ended"] = cfg.open_ended;
    j["clear_after_event"] = cfg.clear_after_event;
    j["classify_every_frame"] = cfg.classify_every_frame;
    return j;
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    try {
        c.frame_width = j.at("frame_width").get<std::size_t>();
        c.frame_height = j.at("frame_height").get<std::size_t>();
        c.block = j.at("block").get<std::size_t>();
        c.measurements = j.at("measurements").get<std::size_t>();
        c.phi_seed = j.at("phi_seed").get<std::uint64_t>();
        c.template_sizes = j.at("template_sizes").get<std::vector<std::size_t>>();
        if (!j.at("activity_threshold").is_null()) c.activity_threshold = j.at("activity_threshold").get<double>();
        if (!j.at("compressed_threshold").is_null()) c.compressed_threshold = j.at("compressed_threshold").get<double>();
        if (!j.at("tau").is_null()) c.tau = j.at("tau").get<std::size_t>();
        c.clusters_per_class = j.at("clusters_per_class").get<std::size_t>();
        c.kmeans_seed = j.at("kmeans_seed").get<std::uint64_t>();
        c.kmeans_max_iter = j.at("kmeans_max_iter").get<std::size_t>();
        c.dba_max_iter = j.at("dba_max_iter").get<std::size_t>();
        c.dba_tol = j.at("dba_tol").get<double>();
        c.pca_dims = j.at("pca_dims").get<std::size_t>();
        c.chi2_threshold = j.at("chi2_threshold").get<double>();
        c.fifo_length = j.at("fifo_length").get<std::size_t>();
        c.gate_min_active = j.at("gate_min_active").get<std::size_t>();
        c.gate_quiet = j.at("gate_quiet").get<std::size_t>();
        c.open_ended = j.at("open_ended").get<bool>();
        c.clear_after_event = j.at("clear_after_event").get<bool>();
        c.classify_every_frame = j.at("classify_every_frame").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("config: ") + e.what());
    }
    return c;
}

}  // namespace csg
