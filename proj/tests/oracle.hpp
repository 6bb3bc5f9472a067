// Brute-force reference for every metric level. Materializes per-point
// indicators and evaluates each formula literally, with no shared code
// paths into the library's accumulation or metric routines. Slow on
// purpose; used only to cross-check the engine on small datasets.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "segeval/types.hpp"

namespace oracle {

struct Cloud {
    std::string id;
    std::vector<std::uint32_t> gt;
    std::vector<std::uint32_t> pred;
    std::vector<std::uint32_t> inst; ///< empty when the cloud has no instance data
};

struct Levels {
    std::vector<std::optional<double>> dataset_per_category;
    std::vector<std::optional<double>> cloud_first_per_cloud;
    std::vector<std::optional<double>> category_first_per_category;
    std::vector<std::optional<double>> instance_per_category;
    std::optional<double> dataset_mean;
    std::optional<double> cloud_first_mean;
    std::optional<double> category_first_mean;
    std::optional<double> instance_mean;
};

struct Result {
    double overall_accuracy = 0.0;
    Levels iou;
    Levels acc;
};

Result evaluate(const std::vector<Cloud>& clouds, std::uint32_t num_categories,
                const segeval::MetricConfig& config);

} // namespace oracle
