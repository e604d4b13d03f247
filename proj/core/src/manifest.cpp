#include "chartkit/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chartkit/errors.hpp"

namespace chartkit {

namespace {

    const std::set<std::string>& known_field_names()
    {
        static const std::set<std::string> fields {
            "song_id", "title", "artist", "genre", "mix_audio_path", "drum_stem_path",
            "gt_chart_path", "passed_screen", "median_drum_rms"
        };
        return fields;
    }

    std::string require_string(const nlohmann::json& entry, const char* field,
        const std::string& entry_name)
    {
        if (!entry.contains(field) || !entry[field].is_string()) {
            throw ParseError("manifest entry " + entry_name + ": missing required field '"
                + field + "'");
        }
        return entry[field].get<std::string>();
    }

}

const std::vector<std::string>& known_genres()
{
    static const std::vector<std::string> genres {
        "punk", "metal", "pop", "rock", "electronic", "hip-hop", "prog", "country"
    };
    return genres;
}

Manifest parse_manifest(const std::string& json_text)
{
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!root.is_array()) {
        throw ParseError("manifest must be a JSON array of entries");
    }

    Manifest manifest;
    std::set<std::string> seen_ids;
    for (std::size_t i = 0; i < root.size(); ++i) {
        const auto& raw = root[i];
        if (!raw.is_object()) {
            throw ParseError("manifest entry #" + std::to_string(i) + " is not an object");
        }
        const std::string entry_name = raw.contains("song_id") && raw["song_id"].is_string()
            ? "'" + raw["song_id"].get<std::string>() + "'"
            : "#" + std::to_string(i);

        ManifestEntry entry;
        entry.song_id = require_string(raw, "song_id", entry_name);
        entry.title = require_string(raw, "title", entry_name);
        entry.artist = require_string(raw, "artist", entry_name);
        entry.genre = require_string(raw, "genre", entry_name);
        entry.mix_audio_path = require_string(raw, "mix_audio_path", entry_name);
        entry.drum_stem_path = require_string(raw, "drum_stem_path", entry_name);
        entry.gt_chart_path = require_string(raw, "gt_chart_path", entry_name);

        const auto& genres = known_genres();
        if (std::find(genres.begin(), genres.end(), entry.genre) == genres.end()) {
            throw ParseError("manifest entry " + entry_name + ": unknown genre '"
                + entry.genre + "'");
        }
        if (!seen_ids.insert(entry.song_id).second) {
            throw ParseError("manifest entry " + entry_name + ": duplicate song_id");
        }

        if (raw.contains("passed_screen")) {
            if (!raw["passed_screen"].is_boolean()) {
                throw ParseError("manifest entry " + entry_name
                    + ": passed_screen must be a boolean");
            }
            entry.passed_screen = raw["passed_screen"].get<bool>();
        }
        if (raw.contains("median_drum_rms")) {
            if (!raw["median_drum_rms"].is_number()) {
                throw ParseError("manifest entry " + entry_name
                    + ": median_drum_rms must be a number");
            }
            entry.median_drum_rms = raw["median_drum_rms"].get<double>();
        }

        nlohmann::json extra = nlohmann::json::object();
        for (const auto& [key, value] : raw.items()) {
            if (known_field_names().count(key) == 0) {
                extra[key] = value;
            }
        }
        entry.extra_json = extra.dump();
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

Manifest load_manifest(const std::string& path)
{
    std::ifstream file(path);
    if (!file) {
        throw ParseError("cannot open manifest: " + path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    try {
        return parse_manifest(buffer.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string serialize_manifest(const Manifest& manifest)
{
    nlohmann::json root = nlohmann::json::array();
    for (const auto& entry : manifest.entries) {
        nlohmann::json object;
        try {
            object = nlohmann::json::parse(entry.extra_json);
        } catch (const nlohmann::json::parse_error&) {
            object = nlohmann::json::object();
        }
        object["song_id"] = entry.song_id;
        object["title"] = entry.title;
        object["artist"] = entry.artist;
        object["genre"] = entry.genre;
        object["mix_audio_path"] = entry.mix_audio_path;
        object["drum_stem_path"] = entry.drum_stem_path;
        object["gt_chart_path"] = entry.gt_chart_path;
        object["passed_screen"] = entry.passed_screen;
        object["median_drum_rms"] = entry.median_drum_rms;
        root.push_back(std::move(object));
    }
    return root.dump(2) + "\n";
}

void save_manifest(const Manifest& manifest, const std::string& path)
{
    std::ofstream file(path);
    if (!file) {
        throw Error("cannot open for writing: " + path);
    }
    file << serialize_manifest(manifest);
}

}
