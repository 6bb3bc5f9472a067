#include "oracle.hpp"

#include <map>

namespace oracle {

namespace {

struct Counts {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

bool kind_is_iou(int kind) { return kind == 0; }

// Literal per-point counting for one (cloud, category).
Counts count_for(const Cloud& cloud, std::uint32_t c, std::uint32_t ignore_id) {
    Counts counts;
    for (std::size_t i = 0; i < cloud.gt.size(); ++i) {
        if (cloud.gt[i] == ignore_id) continue;
        const bool gt_is_c = cloud.gt[i] == c;
        const bool pred_is_c = cloud.pred[i] == c;
        if (gt_is_c && pred_is_c) ++counts.tp;
        if (!gt_is_c && pred_is_c) ++counts.fp;
        if (gt_is_c && !pred_is_c) ++counts.fn;
        if (!gt_is_c && !pred_is_c) ++counts.tn;
    }
    return counts;
}

std::optional<double> ratio(int kind, const Counts& counts,
                            const segeval::MetricConfig& config) {
    const bool absent = config.null_mode == segeval::NullMode::GtAbsent
                            ? counts.tp + counts.fn == 0
                            : counts.tp + counts.fp + counts.fn == 0;
    if (absent) return std::nullopt;
    if (kind_is_iou(kind))
        return static_cast<double>(counts.tp) /
               static_cast<double>(counts.tp + counts.fp + counts.fn);
    if (config.acc_mode == segeval::AccMode::Paper)
        return static_cast<double>(counts.tp + counts.tn) /
               static_cast<double>(counts.tp + counts.fp + counts.fn + counts.tn);
    if (counts.tp + counts.fn == 0) return std::nullopt;
    return static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
}

std::optional<double> mean_skipping(const std::vector<std::optional<double>>& values) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& v : values) {
        if (v) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

Levels evaluate_kind(int kind, const std::vector<Cloud>& clouds,
                     std::uint32_t num_categories, const segeval::MetricConfig& config) {
    const std::size_t P = clouds.size();
    Levels levels;

    // Dataset level: counts summed over clouds, one ratio per category.
    for (std::uint32_t c = 0; c < num_categories; ++c) {
        Counts sum;
        for (const auto& cloud : clouds) {
            const Counts counts = count_for(cloud, c, config.ignore_id);
            sum.tp += counts.tp;
            sum.fp += counts.fp;
            sum.fn += counts.fn;
            sum.tn += counts.tn;
        }
        levels.dataset_per_category.push_back(ratio(kind, sum, config));
    }
    levels.dataset_mean = mean_skipping(levels.dataset_per_category);

    // Cloud first: per-cloud mean over categories, then mean over clouds.
    for (const auto& cloud : clouds) {
        std::vector<std::optional<double>> row;
        for (std::uint32_t c = 0; c < num_categories; ++c)
            row.push_back(ratio(kind, count_for(cloud, c, config.ignore_id), config));
        levels.cloud_first_per_cloud.push_back(mean_skipping(row));
    }
    levels.cloud_first_mean = mean_skipping(levels.cloud_first_per_cloud);

    // Category first: per-category mean over clouds, then mean over categories.
    for (std::uint32_t c = 0; c < num_categories; ++c) {
        std::vector<std::optional<double>> column;
        for (const auto& cloud : clouds)
            column.push_back(ratio(kind, count_for(cloud, c, config.ignore_id), config));
        levels.category_first_per_category.push_back(mean_skipping(column));
    }
    levels.category_first_mean = mean_skipping(levels.category_first_per_category);

    // Instance level: per-instance ratios pooled per category across clouds.
    for (std::uint32_t c = 0; c < num_categories; ++c) {
        double sum = 0.0;
        std::uint64_t instances_total = 0;
        for (std::size_t p = 0; p < P; ++p) {
            const Cloud& cloud = clouds[p];
            if (cloud.inst.empty()) continue;

            std::map<std::uint32_t, std::pair<std::uint64_t, std::uint64_t>> members;
            for (std::size_t i = 0; i < cloud.gt.size(); ++i) {
                if (cloud.gt[i] == config.ignore_id) continue;
                if (cloud.gt[i] != c) continue;
                if (cloud.inst[i] == segeval::kNoInstance) continue;
                auto& [tp, fn] = members[cloud.inst[i]];
                if (cloud.pred[i] == c) ++tp;
                else ++fn;
            }
            if (members.empty()) continue;

            const Counts counts = count_for(cloud, c, config.ignore_id);
            std::uint64_t total_size = 0;
            for (const auto& [id, tpfn] : members) total_size += tpfn.first + tpfn.second;

            for (const auto& [id, tpfn] : members) {
                const auto [tp, fn] = tpfn;
                const std::uint64_t size = tp + fn;
                const double share = static_cast<double>(size) /
                                     static_cast<double>(total_size) *
                                     static_cast<double>(counts.fp);
                double value = 0.0;
                if (kind_is_iou(kind)) {
                    value = static_cast<double>(tp) / (static_cast<double>(tp + fn) + share);
                } else if (config.acc_mode == segeval::AccMode::Paper) {
                    double tn_term = static_cast<double>(counts.tn);
                    if (config.instance_tn_mode == segeval::InstanceTnMode::Allocated)
                        tn_term = static_cast<double>(counts.tn) *
                                  static_cast<double>(size) /
                                  static_cast<double>(total_size);
                    value = (static_cast<double>(tp) + tn_term) /
                            (static_cast<double>(tp + fn) + tn_term + share);
                } else {
                    value = static_cast<double>(tp) / static_cast<double>(tp + fn);
                }
                sum += value;
                ++instances_total;
            }
        }
        if (instances_total == 0) levels.instance_per_category.push_back(std::nullopt);
        else
            levels.instance_per_category.push_back(sum /
                                                   static_cast<double>(instances_total));
    }
    levels.instance_mean = mean_skipping(levels.instance_per_category);
    return levels;
}

} // namespace

Result evaluate(const std::vector<Cloud>& clouds, std::uint32_t num_categories,
                const segeval::MetricConfig& config) {
    Result result;
    std::uint64_t correct = 0, valid = 0;
    for (const auto& cloud : clouds) {
        for (std::size_t i = 0; i < cloud.gt.size(); ++i) {
            if (cloud.gt[i] == config.ignore_id) continue;
            ++valid;
            if (cloud.gt[i] == cloud.pred[i]) ++correct;
        }
    }
    result.overall_accuracy =
        valid == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(valid);
    result.iou = evaluate_kind(0, clouds, num_categories, config);
    result.acc = evaluate_kind(1, clouds, num_categories, config);
    return result;
}

} // namespace oracle
