#include "segeval/manifest.hpp"

#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "segeval/error.hpp"

namespace segeval {

namespace {

using nlohmann::json;

const json& require_field(const json& doc, const char* key, const std::string& where) {
    auto it = doc.find(key);
    if (it == doc.end())
        throw InputError(where + ": missing field '" + key + "'");
    return *it;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& raw) {
    std::filesystem::path p(raw);
    return p.is_absolute() ? p : base / p;
}

} // namespace

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest '" + path.string() + "'");

    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("manifest '" + path.string() + "': " + e.what());
    }
    const std::string where = "manifest '" + path.string() + "'";
    if (!doc.is_object()) throw InputError(where + ": top level must be an object");

    Manifest manifest;
    try {
        manifest.num_categories = require_field(doc, "num_categories", where).get<std::uint32_t>();
        manifest.ignore_id = require_field(doc, "ignore_id", where).get<std::uint32_t>();
        if (manifest.num_categories == 0)
            throw InputError(where + ": num_categories must be at least 1");

        if (auto it = doc.find("category_names"); it != doc.end()) {
            auto names = it->get<std::vector<std::string>>();
            if (names.size() != manifest.num_categories)
                throw InputError(where + ": category_names has " +
                                 std::to_string(names.size()) + " entries, expected " +
                                 std::to_string(manifest.num_categories));
            manifest.category_names = std::move(names);
        }

        const auto base = path.has_parent_path() ? path.parent_path()
                                                 : std::filesystem::path(".");
        const json& clouds = require_field(doc, "clouds", where);
        if (!clouds.is_array()) throw InputError(where + ": 'clouds' must be an array");

        std::unordered_set<std::string> seen;
        for (const auto& entry : clouds) {
            const std::string cwhere = where + ", cloud " + std::to_string(manifest.clouds.size());
            CloudEntry cloud;
            cloud.cloud_id = require_field(entry, "cloud_id", cwhere).get<std::string>();
            if (cloud.cloud_id.empty())
                throw InputError(cwhere + ": cloud_id must be nonempty");
            if (!seen.insert(cloud.cloud_id).second)
                throw InputError(where + ": duplicate cloud id '" + cloud.cloud_id + "'");
            cloud.gt_path = resolve(base, require_field(entry, "gt_path", cwhere).get<std::string>());
            cloud.pred_path = resolve(base, require_field(entry, "pred_path", cwhere).get<std::string>());
            if (auto it = entry.find("instance_path"); it != entry.end() && !it->is_null())
                cloud.instance_path = resolve(base, it->get<std::string>());
            manifest.clouds.push_back(std::move(cloud));
        }
    } catch (const json::exception& e) {
        throw InputError(where + ": " + e.what());
    }
    return manifest;
}

} // namespace segeval
