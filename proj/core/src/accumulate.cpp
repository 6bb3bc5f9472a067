#include "segeval/accumulate.hpp"

#include <algorithm>
#include <utility>

#include "segeval/error.hpp"

namespace segeval {

namespace {

std::string position(const std::string& cloud_id) {
    return cloud_id.empty() ? std::string() : "cloud '" + cloud_id + "': ";
}

} // namespace

CloudAccumulator::CloudAccumulator(std::string cloud_id, std::uint32_t num_categories,
                                   const MetricConfig& config, bool with_instances)
    : cloud_id_(std::move(cloud_id)),
      num_categories_(num_categories),
      ignore_id_(config.ignore_id),
      with_instances_(with_instances) {
    if (num_categories_ == 0) throw ConfigError("num_categories must be at least 1");
    stats_.cloud_id = cloud_id_;
    stats_.cells.resize(num_categories_);
    stats_.instances.resize(num_categories_);
    stats_.has_instance_data = with_instances_;
}

void CloudAccumulator::fail(const std::string& what) const {
    throw InputError(position(cloud_id_) + what);
}

void CloudAccumulator::update(std::span<const std::uint32_t> gt,
                              std::span<const std::uint32_t> pred,
                              std::span<const std::uint32_t> inst) {
    if (gt.size() != pred.size())
        fail("ground truth and prediction length mismatch (" +
             std::to_string(offset_ + gt.size()) + " vs " +
             std::to_string(offset_ + pred.size()) + ")");
    if (with_instances_ && inst.size() != gt.size())
        fail("instance array length mismatch (" + std::to_string(offset_ + inst.size()) +
             " vs " + std::to_string(offset_ + gt.size()) + ")");
    if (!with_instances_ && !inst.empty())
        fail("instance data supplied to an accumulator created without instances");

    for (std::size_t k = 0; k < gt.size(); ++k) {
        const std::uint32_t g = gt[k];
        const std::uint32_t q = pred[k];
        if (q == ignore_id_)
            fail("prediction label equals the ignore id at point " +
                 std::to_string(offset_ + k));
        if (q >= num_categories_)
            fail("prediction label " + std::to_string(q) + " out of range (0.." +
                 std::to_string(num_categories_ - 1) + ") at point " +
                 std::to_string(offset_ + k));
        if (g == ignore_id_) {
            if (with_instances_ && inst[k] != kNoInstance)
                fail("instance id on an ignored point at point " +
                     std::to_string(offset_ + k));
            continue;
        }
        if (g >= num_categories_)
            fail("ground-truth label " + std::to_string(g) + " out of range (0.." +
                 std::to_string(num_categories_ - 1) + ") at point " +
                 std::to_string(offset_ + k));

        ++stats_.valid_points;
        const bool correct = g == q;
        if (correct) {
            ++stats_.cells[g].tp;
        } else {
            ++stats_.cells[g].fn;
            ++stats_.cells[q].fp;
        }

        if (with_instances_) {
            const std::uint32_t id = inst[k];
            if (id == kNoInstance) {
                ++stats_.uninstanced_points;
            } else {
                // Key scopes the instance id to its ground-truth category.
                const std::uint64_t key = (static_cast<std::uint64_t>(g) << 32) | id;
                auto& entry = instance_map_[key];
                entry.instance_id = id;
                if (correct) ++entry.tp;
                else ++entry.fn;
            }
        }
    }
    offset_ += gt.size();
}

CloudStats CloudAccumulator::finish() {
    for (auto& cell : stats_.cells)
        cell.tn = stats_.valid_points - cell.tp - cell.fp - cell.fn;

    for (const auto& [key, entry] : instance_map_) {
        const auto category = static_cast<std::uint32_t>(key >> 32);
        stats_.instances[category].push_back(entry);
    }
    for (auto& list : stats_.instances)
        std::sort(list.begin(), list.end(),
                  [](const InstanceStats& a, const InstanceStats& b) {
                      return a.instance_id < b.instance_id;
                  });
    instance_map_.clear();
    return std::move(stats_);
}

std::vector<ConfusionCell> count_confusion(std::span<const std::uint32_t> gt,
                                           std::span<const std::uint32_t> pred,
                                           const MetricConfig& config,
                                           std::uint32_t num_categories) {
    CloudAccumulator acc({}, num_categories, config, false);
    acc.update(gt, pred);
    return acc.finish().cells;
}

std::vector<std::vector<InstanceStats>> count_instances(
    std::span<const std::uint32_t> gt, std::span<const std::uint32_t> pred,
    std::span<const std::uint32_t> inst, const MetricConfig& config,
    std::uint32_t num_categories) {
    CloudAccumulator acc({}, num_categories, config, true);
    acc.update(gt, pred, inst);
    return acc.finish().instances;
}

DatasetStats merge(const DatasetStats& a, const DatasetStats& b) {
    if (a.num_categories != b.num_categories)
        throw ConfigError("merge: num_categories differ (" +
                          std::to_string(a.num_categories) + " vs " +
                          std::to_string(b.num_categories) + ")");
    if (a.config_fingerprint != b.config_fingerprint)
        throw ConfigError("merge: config fingerprints differ ('" +
                          a.config_fingerprint + "' vs '" + b.config_fingerprint + "')");

    DatasetStats out;
    out.num_categories = a.num_categories;
    out.config_fingerprint = a.config_fingerprint;
    out.clouds.reserve(a.clouds.size() + b.clouds.size());
    out.clouds.insert(out.clouds.end(), a.clouds.begin(), a.clouds.end());
    out.clouds.insert(out.clouds.end(), b.clouds.begin(), b.clouds.end());
    std::sort(out.clouds.begin(), out.clouds.end(),
              [](const CloudStats& x, const CloudStats& y) {
                  return x.cloud_id < y.cloud_id;
              });
    for (std::size_t i = 1; i < out.clouds.size(); ++i)
        if (out.clouds[i - 1].cloud_id == out.clouds[i].cloud_id)
            throw InputError("merge: duplicate cloud id '" + out.clouds[i].cloud_id + "'");

    out.skipped_clouds.reserve(a.skipped_clouds.size() + b.skipped_clouds.size());
    out.skipped_clouds.insert(out.skipped_clouds.end(), a.skipped_clouds.begin(),
                              a.skipped_clouds.end());
    out.skipped_clouds.insert(out.skipped_clouds.end(), b.skipped_clouds.begin(),
                              b.skipped_clouds.end());
    std::sort(out.skipped_clouds.begin(), out.skipped_clouds.end());
    return out;
}

} // namespace segeval
