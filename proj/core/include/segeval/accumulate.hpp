#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "segeval/types.hpp"

namespace segeval {

/// Single-pass confusion and instance accumulation for one cloud.
/// Accepts the point stream in chunks, so callers can keep memory
/// proportional to the chunk size rather than the cloud size.
class CloudAccumulator {
public:
    CloudAccumulator(std::string cloud_id, std::uint32_t num_categories,
                     const MetricConfig& config, bool with_instances);

    /// Consume the next chunk of aligned points. `inst` must match `gt`
    /// in length when the accumulator was created with instances, and be
    /// empty otherwise.
    void update(std::span<const std::uint32_t> gt,
                std::span<const std::uint32_t> pred,
                std::span<const std::uint32_t> inst = {});

    /// Derive tn counts and sorted instance lists. The accumulator is
    /// spent afterwards.
    CloudStats finish();

private:
    std::string cloud_id_;
    std::uint32_t num_categories_;
    std::uint32_t ignore_id_;
    bool with_instances_;
    std::uint64_t offset_ = 0; ///< points consumed so far, for error positions
    CloudStats stats_;
    std::unordered_map<std::uint64_t, InstanceStats> instance_map_;

    [[noreturn]] void fail(const std::string& what) const;
};

/// Confusion cells for one cloud, one cell per category. Points whose
/// ground-truth label equals the ignore id contribute to no counter.
std::vector<ConfusionCell> count_confusion(std::span<const std::uint32_t> gt,
                                           std::span<const std::uint32_t> pred,
                                           const MetricConfig& config,
                                           std::uint32_t num_categories);

/// Per-category instance hit/miss counts for one cloud, instances sorted
/// ascending by id. Ground-truth points without an instance id are skipped
/// here (they still count in the confusion cells).
std::vector<std::vector<InstanceStats>> count_instances(
    std::span<const std::uint32_t> gt, std::span<const std::uint32_t> pred,
    std::span<const std::uint32_t> inst, const MetricConfig& config,
    std::uint32_t num_categories);

/// Union of two stats with disjoint cloud ids, reordered canonically by
/// cloud id. Associative and commutative; integer cells merge bit-exactly.
DatasetStats merge(const DatasetStats& a, const DatasetStats& b);

} // namespace segeval
