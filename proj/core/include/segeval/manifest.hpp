#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "segeval/types.hpp"

namespace segeval {

/// One cloud's label files. Paths are absolute after loading (relative
/// entries resolve against the manifest's directory).
struct CloudEntry {
    std::string cloud_id;
    std::filesystem::path gt_path;
    std::filesystem::path pred_path;
    std::optional<std::filesystem::path> instance_path;
};

/// Dataset description, stored as a `.segm.json` document.
struct Manifest {
    std::uint32_t num_categories = 0;
    std::uint32_t ignore_id = kDefaultIgnoreId;
    std::vector<CloudEntry> clouds;
    std::optional<std::vector<std::string>> category_names;
};

/// Parse and validate a manifest file. Throws InputError on schema
/// violations (missing fields, duplicate cloud ids, bad category_names
/// length) and IoError when the file cannot be read.
Manifest load_manifest(const std::filesystem::path& path);

} // namespace segeval
