#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "segeval/types.hpp"

namespace segeval {

/// Recipe for a deterministic synthetic dataset with controllable
/// category-frequency and instance-size imbalance.
struct SynthSpec {
    std::uint64_t seed = 0;
    std::uint32_t num_clouds = 1;
    std::uint32_t num_categories = 1;

    /// Probability that each category appears in a cloud; empty means 1.0
    /// for every category.
    std::vector<double> category_frequency;

    /// Instance sizes drawn as min + (max - min) * u^skew; a high skew
    /// exponent yields many small instances and occasional huge ones.
    struct SizeLaw {
        std::uint32_t min_points = 20;
        std::uint32_t max_points = 200;
        double skew = 1.0;
    } instance_size_law;

    /// Instances drawn per (cloud, category) when the category is present.
    struct InstanceCount {
        std::uint32_t min_instances = 1;
        std::uint32_t max_instances = 3;
    } instances_per_category;

    struct ErrorModel {
        /// Per-category probability of relabeling a point; empty means 0.
        std::vector<double> miss_rate;
        /// Per-category wrong label to emit; empty means (c + 1) % C.
        std::vector<std::uint32_t> confusion_target;
        /// When set, the largest instance of each (cloud, category) is
        /// never corrupted; errors concentrate on the smaller instances.
        bool size_targeted = false;
    } error_model;
};

struct SynthCloud {
    std::string cloud_id;
    LabelArray gt;
    InstanceArray instances; ///< aligned with gt; ids scoped per category
};

/// Deterministic function of the spec: same spec, same clouds, on every
/// platform. Every generated point carries an instance id.
std::vector<SynthCloud> generate(const SynthSpec& spec);

/// Per-point corruption of the ground truth under the error model;
/// deterministic in the seed. Zero rates return the labels unchanged.
std::vector<LabelArray> corrupt(std::span<const SynthCloud> clouds,
                                const SynthSpec::ErrorModel& model,
                                std::uint64_t seed, std::uint32_t num_categories);

struct EmitSummary {
    std::uint32_t num_clouds = 0;
    std::uint64_t num_points = 0;
    std::filesystem::path manifest_path;
};

/// Generate, corrupt, and write the dataset to `dir` as a manifest plus
/// binary label/instance files.
EmitSummary emit_dataset(const SynthSpec& spec, const std::filesystem::path& dir);

} // namespace segeval
