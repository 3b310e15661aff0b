#pragma once

// Flat `key = value` configuration files whose keys mirror sim_config fields.

#include <map>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "sim_engine.hpp"
#include "text_io.hpp"

namespace smartstream {

struct config_entry {
    std::string value;
    std::size_t line = 0;
};

using config_document = std::map<std::string, config_entry, std::less<>>;

inline config_document load_config(std::string const& path) {
    config_document doc;
    for (auto const& line : text::read_lines(path)) {
        auto eq = line.text.find('=');
        if (eq == std::string::npos) throw parse_error(path, line.number, "expected `key = value`");
        auto key = std::string(text::trim(std::string_view(line.text).substr(0, eq)));
        auto value = std::string(text::trim(std::string_view(line.text).substr(eq + 1)));
        if (key.empty()) throw parse_error(path, line.number, "empty key");
        doc[key] = {value, line.number};
    }
    return doc;
}

// "unlimited" or a nonnegative number of Mb/s.
inline double parse_capacity(std::string_view s) {
    if (s == "unlimited" || s == "inf") return unlimited_capacity;
    auto v = text::to_double(s);
    if (!v || *v < 0.0) throw invalid_input("capacity must be a nonnegative number or `unlimited`");
    return *v;
}

inline playback_model parse_playback(std::string_view s) {
    if (s == "freeze") return playback_model::freeze;
    if (s == "skip") return playback_model::skip;
    throw invalid_input("playback model must be `freeze` or `skip`");
}

// Applies one key to a sim_config. Returns false for keys that are not
// sim_config fields.
inline bool apply_sim_key(sim_config& c, std::string_view key, std::string_view value) {
    auto number = [&]() {
        auto v = text::to_double(value);
        if (!v) throw invalid_input("`" + std::string(key) + "` expects a number, got `" + std::string(value) + "`");
        return *v;
    };
    auto count = [&]() {
        auto v = text::to_int(value);
        if (!v || *v < 0)
            throw invalid_input("`" + std::string(key) + "` expects a nonnegative integer, got `" +
                                std::string(value) + "`");
        return static_cast<std::size_t>(*v);
    };

    if (key == "bitrate") c.bitrate = number();
    else if (key == "video_length") c.video_length = count();
    else if (key == "access_cap") c.access_cap = number();
    else if (key == "server_capacity") c.server_capacity = parse_capacity(value);
    else if (key == "startup_threshold") c.startup_threshold = number();
    else if (key == "rebuffer_threshold") c.rebuffer_threshold = number();
    else if (key == "freeze_trigger") c.freeze_trigger = number();
    else if (key == "playback_model") c.playback = parse_playback(value);
    else if (key == "seed") c.seed = count();
    else if (key == "duration") c.duration = count();
    else if (key == "warmup") c.warmup = count();
    else return false;
    return true;
}

} // namespace smartstream
