#ifndef CHARTKIT_MANIFEST_HPP
#define CHARTKIT_MANIFEST_HPP

#include <string>
#include <vector>

namespace chartkit {

// One benchmark song. Unknown JSON fields are kept verbatim in extra_json
// (a serialised object) so editing a manifest never drops third-party data.
struct ManifestEntry {
    std::string song_id;
    std::string title;
    std::string artist;
    std::string genre;
    std::string mix_audio_path;
    std::string drum_stem_path;
    std::string gt_chart_path;
    bool passed_screen = false;
    double median_drum_rms = 0.0;
    std::string extra_json = "{}";
};

struct Manifest {
    std::vector<ManifestEntry> entries;
};

// The closed genre vocabulary accepted in manifests.
const std::vector<std::string>& known_genres();

// Parses a JSON array of entry objects. Throws ParseError naming the entry
// on a missing required field, an unknown genre, or a duplicate song_id.
// passed_screen and median_drum_rms default to false / 0.0 when absent.
Manifest parse_manifest(const std::string& json_text);
Manifest load_manifest(const std::string& path);

// Deterministic serialisation (two-space indent, lexicographic keys);
// unknown fields from extra_json are merged back into each entry.
std::string serialize_manifest(const Manifest& manifest);
void save_manifest(const Manifest& manifest, const std::string& path);

}

#endif
