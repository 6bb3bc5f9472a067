#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "segeval/types.hpp"

namespace segeval {

/// Selects between the intersection-over-union and accuracy formula families.
enum class MetricKind { Iou, Acc };

std::string_view to_string(MetricKind kind);

/// One metric level: the constituents and their mean.
///
/// The dataset, category-first and instance levels are defined by one value
/// per category; the cloud-first level by one value per cloud. Only the
/// defining collection is populated, the other vector stays empty.
struct LevelResult {
    std::vector<MetricValue> per_category;
    std::vector<MetricValue> per_cloud;
    MetricValue summary;

    bool operator==(const LevelResult&) const = default;
};

/// Ratio for one (cloud, category) cell, or NULL when the category is
/// absent under the configured null mode. Also NULL if the selected
/// formula has a zero denominator (recall of a category with fp only).
MetricValue cell_metric(MetricKind kind, const ConfusionCell& cell,
                        const MetricConfig& config);

/// Counts summed over all clouds per category, then one ratio per category.
/// A category whose summed counts are absent everywhere is NULL and
/// excluded from the summary mean.
LevelResult metric_dataset_level(MetricKind kind, const DatasetStats& stats,
                                 const MetricConfig& config);

/// Per-cloud mean over that cloud's non-NULL categories, then the mean of
/// the per-cloud values; clouds with every category NULL are skipped.
LevelResult metric_cloud_first(MetricKind kind, const DatasetStats& stats,
                               const MetricConfig& config);

/// Per-category mean over the clouds where the category appears, then the
/// mean of the per-category values.
LevelResult metric_category_first(MetricKind kind, const DatasetStats& stats,
                                  const MetricConfig& config);

/// Cloud-level fp split among instances proportionally to instance size.
/// Shares sum to fp_pc up to rounding.
std::vector<double> allocate_fp(std::span<const InstanceStats> instances,
                                std::uint64_t fp_pc);

/// One ratio per ground-truth instance (fp entering via its allocated
/// share), pooled per category across all clouds. Categories with no
/// instances anywhere are NULL.
LevelResult metric_instance_level(MetricKind kind, const DatasetStats& stats,
                                  const MetricConfig& config);

/// Correctly predicted valid points over all valid points.
double overall_accuracy(const DatasetStats& stats);

/// Instance coverage gaps that the instance level cannot attribute.
struct InstanceDiagnostics {
    /// (cloud, category) pairs with fp > 0 but no instances to absorb it.
    std::uint64_t unattributed_fp_pairs = 0;
    std::uint64_t unattributed_fp_points = 0;
    /// Valid ground-truth points lacking an instance id in clouds that
    /// supplied instance data.
    std::uint64_t uninstanced_points = 0;
};

InstanceDiagnostics instance_diagnostics(const DatasetStats& stats);

} // namespace segeval
