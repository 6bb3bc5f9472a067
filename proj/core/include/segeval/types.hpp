#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segeval {

/// Per-point category labels for one cloud; values are category ids
/// below num_categories, or the configured ignore id for unlabeled points.
using LabelArray = std::vector<std::uint32_t>;

/// Per-point instance ids aligned with the ground-truth labels.
/// Instance identity is scoped to a (cloud, category) pair: the same id
/// under two different ground-truth categories names two distinct instances.
using InstanceArray = std::vector<std::uint32_t>;

/// Sentinel in instance arrays and files: this point belongs to no instance.
inline constexpr std::uint32_t kNoInstance = 0xFFFFFFFFu;

/// Default ignore id; cannot collide with a real category.
inline constexpr std::uint32_t kDefaultIgnoreId = 0xFFFFFFFFu;

/// When a category counts as absent (NULL) in a cloud.
enum class NullMode {
    GtAbsent,    ///< no ground-truth points: tp + fn == 0
    UnionAbsent, ///< no ground-truth and no predicted points: tp + fp + fn == 0
};

/// Which per-category accuracy formula to use.
enum class AccMode {
    Paper,  ///< (tp + tn) / (tp + fp + fn + tn)
    Recall, ///< tp / (tp + fn)
};

/// How the true-negative term of per-instance accuracy is derived.
enum class InstanceTnMode {
    CloudLevel, ///< every instance uses the cloud-level tn of its category
    Allocated,  ///< tn scaled by instance size, like the fp share
};

std::string_view to_string(NullMode mode);
std::string_view to_string(AccMode mode);
std::string_view to_string(InstanceTnMode mode);
NullMode parse_null_mode(std::string_view text);
AccMode parse_acc_mode(std::string_view text);
InstanceTnMode parse_instance_tn_mode(std::string_view text);

struct MetricConfig {
    std::uint32_t ignore_id = kDefaultIgnoreId;
    NullMode null_mode = NullMode::GtAbsent;
    AccMode acc_mode = AccMode::Paper;
    InstanceTnMode instance_tn_mode = InstanceTnMode::CloudLevel;

    /// Canonical textual identity; stats and reports built under different
    /// fingerprints refuse to combine.
    std::string fingerprint() const;

    bool operator==(const MetricConfig&) const = default;
};

/// Binary confusion counts for one (cloud, category) pair, in points.
/// Invariant: tp + fp + fn + tn equals the cloud's valid point count.
struct ConfusionCell {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t valid() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionCell&) const = default;
};

/// Ground-truth hit/miss counts of one instance within a (cloud, category).
struct InstanceStats {
    std::uint32_t instance_id = 0;
    std::uint64_t tp = 0;
    std::uint64_t fn = 0;

    /// Instance size in ground-truth points; at least 1 for a real instance.
    std::uint64_t size() const { return tp + fn; }
    bool operator==(const InstanceStats&) const = default;
};

/// Accumulated counts for one cloud.
struct CloudStats {
    std::string cloud_id;
    std::uint64_t valid_points = 0;
    std::vector<ConfusionCell> cells;                  ///< one per category
    std::vector<std::vector<InstanceStats>> instances; ///< per category, ascending instance_id
    bool has_instance_data = false;
    /// Valid ground-truth points that carried no instance id even though the
    /// cloud supplied instance data; they count in cells but in no instance.
    std::uint64_t uninstanced_points = 0;

    bool operator==(const CloudStats&) const = default;
};

/// Mergeable collection of per-cloud stats for a whole dataset.
struct DatasetStats {
    std::uint32_t num_categories = 0;
    std::string config_fingerprint;
    std::vector<CloudStats> clouds; ///< ascending cloud_id once merged
    std::vector<std::string> skipped_clouds; ///< zero valid points at ingest

    std::uint64_t total_valid_points() const;

    bool operator==(const DatasetStats&) const = default;
};

/// A metric value in [0, 1], or empty when the category is absent (NULL).
using MetricValue = std::optional<double>;

/// Mean of the non-NULL entries, in index order; NULL when all entries are.
MetricValue null_skipping_mean(std::span<const MetricValue> values);

} // namespace segeval
