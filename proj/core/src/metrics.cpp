#include "segeval/metrics.hpp"

#include <string>

#include "segeval/error.hpp"

namespace segeval {

namespace {

void require_nonempty(const DatasetStats& stats) {
    if (stats.clouds.empty()) throw InputError("empty dataset: no clouds to evaluate");
    if (stats.num_categories == 0) throw InputError("empty dataset: no categories");
    for (const auto& cloud : stats.clouds)
        if (cloud.cells.size() != stats.num_categories ||
            cloud.instances.size() != stats.num_categories)
            throw InputError("cloud '" + cloud.cloud_id + "' carries " +
                             std::to_string(cloud.cells.size()) + " cells for " +
                             std::to_string(stats.num_categories) + " categories");
}

bool is_absent(const ConfusionCell& cell, NullMode mode) {
    if (mode == NullMode::GtAbsent) return cell.tp + cell.fn == 0;
    return cell.tp + cell.fp + cell.fn == 0;
}

} // namespace

std::string_view to_string(MetricKind kind) {
    return kind == MetricKind::Iou ? "iou" : "acc";
}

MetricValue cell_metric(MetricKind kind, const ConfusionCell& cell,
                        const MetricConfig& config) {
    if (is_absent(cell, config.null_mode)) return std::nullopt;

    if (kind == MetricKind::Iou) {
        const auto denom = cell.tp + cell.fp + cell.fn;
        return static_cast<double>(cell.tp) / static_cast<double>(denom);
    }
    if (config.acc_mode == AccMode::Paper) {
        const auto denom = cell.tp + cell.fp + cell.fn + cell.tn;
        return static_cast<double>(cell.tp + cell.tn) / static_cast<double>(denom);
    }
    // Recall of a category that appears only as fp has no defined value.
    const auto denom = cell.tp + cell.fn;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(cell.tp) / static_cast<double>(denom);
}

LevelResult metric_dataset_level(MetricKind kind, const DatasetStats& stats,
                                 const MetricConfig& config) {
    require_nonempty(stats);
    LevelResult result;
    result.per_category.reserve(stats.num_categories);
    for (std::uint32_t c = 0; c < stats.num_categories; ++c) {
        ConfusionCell sum;
        for (const auto& cloud : stats.clouds) {
            const auto& cell = cloud.cells[c];
            sum.tp += cell.tp;
            sum.fp += cell.fp;
            sum.fn += cell.fn;
            sum.tn += cell.tn;
        }
        result.per_category.push_back(cell_metric(kind, sum, config));
    }
    result.summary = null_skipping_mean(result.per_category);
    return result;
}

LevelResult metric_cloud_first(MetricKind kind, const DatasetStats& stats,
                               const MetricConfig& config) {
    require_nonempty(stats);
    LevelResult result;
    result.per_cloud.reserve(stats.clouds.size());
    std::vector<MetricValue> row(stats.num_categories);
    for (const auto& cloud : stats.clouds) {
        for (std::uint32_t c = 0; c < stats.num_categories; ++c)
            row[c] = cell_metric(kind, cloud.cells[c], config);
        result.per_cloud.push_back(null_skipping_mean(row));
    }
    result.summary = null_skipping_mean(result.per_cloud);
    return result;
}

LevelResult metric_category_first(MetricKind kind, const DatasetStats& stats,
                                  const MetricConfig& config) {
    require_nonempty(stats);
    LevelResult result;
    result.per_category.reserve(stats.num_categories);
    std::vector<MetricValue> column(stats.clouds.size());
    for (std::uint32_t c = 0; c < stats.num_categories; ++c) {
        for (std::size_t p = 0; p < stats.clouds.size(); ++p)
            column[p] = cell_metric(kind, stats.clouds[p].cells[c], config);
        result.per_category.push_back(null_skipping_mean(column));
    }
    result.summary = null_skipping_mean(result.per_category);
    return result;
}

std::vector<double> allocate_fp(std::span<const InstanceStats> instances,
                                std::uint64_t fp_pc) {
    if (instances.empty())
        throw InputError("allocation error: no instances to absorb the fp share");
    std::uint64_t total_size = 0;
    for (const auto& inst : instances) total_size += inst.size();

    std::vector<double> shares;
    shares.reserve(instances.size());
    for (const auto& inst : instances)
        shares.push_back(static_cast<double>(inst.size()) /
                         static_cast<double>(total_size) *
                         static_cast<double>(fp_pc));
    return shares;
}

LevelResult metric_instance_level(MetricKind kind, const DatasetStats& stats,
                                  const MetricConfig& config) {
    require_nonempty(stats);
    LevelResult result;
    result.per_category.reserve(stats.num_categories);
    for (std::uint32_t c = 0; c < stats.num_categories; ++c) {
        double sum = 0.0;
        std::uint64_t count = 0;
        for (const auto& cloud : stats.clouds) {
            const auto& instances = cloud.instances[c];
            if (instances.empty()) continue;
            const auto& cell = cloud.cells[c];
            const std::vector<double> shares = allocate_fp(instances, cell.fp);
            std::uint64_t total_size = 0;
            for (const auto& inst : instances) total_size += inst.size();

            for (std::size_t i = 0; i < instances.size(); ++i) {
                const auto& inst = instances[i];
                const double share = shares[i];
                double value = 0.0;
                if (kind == MetricKind::Iou) {
                    value = static_cast<double>(inst.tp) /
                            (static_cast<double>(inst.tp + inst.fn) + share);
                } else if (config.acc_mode == AccMode::Paper) {
                    double tn_term = static_cast<double>(cell.tn);
                    if (config.instance_tn_mode == InstanceTnMode::Allocated)
                        tn_term = static_cast<double>(cell.tn) *
                                  static_cast<double>(inst.size()) /
                                  static_cast<double>(total_size);
                    value = (static_cast<double>(inst.tp) + tn_term) /
                            (static_cast<double>(inst.tp + inst.fn) + tn_term + share);
                } else {
                    value = static_cast<double>(inst.tp) /
                            static_cast<double>(inst.tp + inst.fn);
                }
                sum += value;
                ++count;
            }
        }
        if (count == 0) result.per_category.push_back(std::nullopt);
        else result.per_category.push_back(sum / static_cast<double>(count));
    }
    result.summary = null_skipping_mean(result.per_category);
    return result;
}

double overall_accuracy(const DatasetStats& stats) {
    require_nonempty(stats);
    std::uint64_t correct = 0;
    std::uint64_t valid = 0;
    for (const auto& cloud : stats.clouds) {
        valid += cloud.valid_points;
        for (const auto& cell : cloud.cells) correct += cell.tp;
    }
    if (valid == 0) throw InputError("overall accuracy undefined: zero valid points");
    return static_cast<double>(correct) / static_cast<double>(valid);
}

InstanceDiagnostics instance_diagnostics(const DatasetStats& stats) {
    InstanceDiagnostics diag;
    for (const auto& cloud : stats.clouds) {
        diag.uninstanced_points += cloud.uninstanced_points;
        for (std::uint32_t c = 0; c < stats.num_categories; ++c) {
            if (cloud.cells[c].fp > 0 && cloud.instances[c].empty()) {
                ++diag.unattributed_fp_pairs;
                diag.unattributed_fp_points += cloud.cells[c].fp;
            }
        }
    }
    return diag;
}

} // namespace segeval
