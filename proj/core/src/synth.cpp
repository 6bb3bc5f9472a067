#include "segeval/synth.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "segeval/error.hpp"
#include "segeval/label_io.hpp"

namespace segeval {

namespace {

// std:: distributions are implementation-defined, so draws go through
// explicit mappings on top of mt19937_64 to keep output platform-stable.
double draw_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint32_t draw_range(std::mt19937_64& rng, std::uint32_t lo, std::uint32_t hi) {
    return lo + static_cast<std::uint32_t>(rng() % (static_cast<std::uint64_t>(hi - lo) + 1));
}

void validate(const SynthSpec& spec) {
    if (spec.num_clouds == 0) throw InputError("synth spec: num_clouds must be at least 1");
    if (spec.num_categories == 0)
        throw InputError("synth spec: num_categories must be at least 1");
    if (!spec.category_frequency.empty() &&
        spec.category_frequency.size() != spec.num_categories)
        throw InputError("synth spec: category_frequency needs one entry per category");
    for (const double f : spec.category_frequency)
        if (f < 0.0 || f > 1.0)
            throw InputError("synth spec: category frequency outside [0,1]");
    const auto& law = spec.instance_size_law;
    if (law.min_points == 0 || law.min_points > law.max_points)
        throw InputError("synth spec: instance size law needs 1 <= min <= max");
    if (law.skew <= 0.0) throw InputError("synth spec: skew exponent must be positive");
    const auto& count = spec.instances_per_category;
    if (count.min_instances == 0 || count.min_instances > count.max_instances)
        throw InputError("synth spec: instance count needs 1 <= min <= max");
}

void validate_model(const SynthSpec::ErrorModel& model, std::uint32_t num_categories) {
    if (!model.miss_rate.empty() && model.miss_rate.size() != num_categories)
        throw InputError("error model: miss_rate needs one entry per category");
    for (const double r : model.miss_rate)
        if (r < 0.0 || r > 1.0) throw InputError("error model: miss rate outside [0,1]");
    if (!model.confusion_target.empty() &&
        model.confusion_target.size() != num_categories)
        throw InputError("error model: confusion_target needs one entry per category");
    for (const std::uint32_t t : model.confusion_target)
        if (t >= num_categories)
            throw InputError("error model: confusion target " + std::to_string(t) +
                             " out of range (num_categories=" +
                             std::to_string(num_categories) + ")");
}

std::string cloud_name(std::uint32_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "cloud_%06u", index);
    return buf;
}

} // namespace

std::vector<SynthCloud> generate(const SynthSpec& spec) {
    validate(spec);
    std::vector<SynthCloud> clouds;
    clouds.reserve(spec.num_clouds);

    for (std::uint32_t p = 0; p < spec.num_clouds; ++p) {
        std::mt19937_64 rng(spec.seed ^ p);
        SynthCloud cloud;
        cloud.cloud_id = cloud_name(p);

        for (std::uint32_t c = 0; c < spec.num_categories; ++c) {
            const double freq =
                spec.category_frequency.empty() ? 1.0 : spec.category_frequency[c];
            if (draw_unit(rng) >= freq) continue;

            const std::uint32_t instances =
                draw_range(rng, spec.instances_per_category.min_instances,
                           spec.instances_per_category.max_instances);
            for (std::uint32_t i = 0; i < instances; ++i) {
                const auto& law = spec.instance_size_law;
                const double u = std::pow(draw_unit(rng), law.skew);
                const auto span = static_cast<double>(law.max_points - law.min_points);
                auto size = law.min_points +
                            static_cast<std::uint32_t>(std::floor(u * (span + 1.0)));
                if (size > law.max_points) size = law.max_points;
                for (std::uint32_t k = 0; k < size; ++k) {
                    cloud.gt.push_back(c);
                    cloud.instances.push_back(i);
                }
            }
        }
        clouds.push_back(std::move(cloud));
    }
    return clouds;
}

std::vector<LabelArray> corrupt(std::span<const SynthCloud> clouds,
                                const SynthSpec::ErrorModel& model,
                                std::uint64_t seed, std::uint32_t num_categories) {
    validate_model(model, num_categories);

    std::vector<LabelArray> predictions;
    predictions.reserve(clouds.size());
    for (std::size_t p = 0; p < clouds.size(); ++p) {
        const SynthCloud& cloud = clouds[p];
        if (cloud.instances.size() != cloud.gt.size())
            throw InputError("corrupt: cloud '" + cloud.cloud_id +
                             "' instance array not aligned with labels");
        std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(p));

        // Largest instance per category; ties resolve to the lowest id.
        std::unordered_map<std::uint64_t, std::uint64_t> sizes;
        for (std::size_t k = 0; k < cloud.gt.size(); ++k) {
            const std::uint32_t c = cloud.gt[k];
            if (c >= num_categories)
                throw InputError("corrupt: cloud '" + cloud.cloud_id + "' label " +
                                 std::to_string(c) + " out of range");
            const std::uint32_t id = cloud.instances[k];
            if (id == kNoInstance) continue;
            ++sizes[(static_cast<std::uint64_t>(c) << 32) | id];
        }
        std::vector<std::uint32_t> largest(num_categories, kNoInstance);
        std::vector<std::uint64_t> largest_size(num_categories, 0);
        for (const auto& [key, size] : sizes) {
            const auto c = static_cast<std::uint32_t>(key >> 32);
            const auto id = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
            if (size > largest_size[c] || (size == largest_size[c] && id < largest[c])) {
                largest_size[c] = size;
                largest[c] = id;
            }
        }

        LabelArray pred;
        pred.reserve(cloud.gt.size());
        for (std::size_t k = 0; k < cloud.gt.size(); ++k) {
            const std::uint32_t c = cloud.gt[k];
            if (model.size_targeted && cloud.instances[k] != kNoInstance &&
                cloud.instances[k] == largest[c]) {
                pred.push_back(c);
                continue;
            }
            const double rate = model.miss_rate.empty() ? 0.0 : model.miss_rate[c];
            if (rate > 0.0 && draw_unit(rng) < rate) {
                const std::uint32_t target = model.confusion_target.empty()
                                                 ? (c + 1) % num_categories
                                                 : model.confusion_target[c];
                pred.push_back(target);
            } else {
                pred.push_back(c);
            }
        }
        predictions.push_back(std::move(pred));
    }
    return predictions;
}

EmitSummary emit_dataset(const SynthSpec& spec, const std::filesystem::path& dir) {
    const auto clouds = generate(spec);
    const auto predictions = corrupt(clouds, spec.error_model, spec.seed, spec.num_categories);

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());

    EmitSummary summary;
    summary.num_clouds = spec.num_clouds;
    for (const auto& cloud : clouds) summary.num_points += cloud.gt.size();

    nlohmann::ordered_json doc;
    doc["num_categories"] = spec.num_categories;
    doc["ignore_id"] = kDefaultIgnoreId;
    doc["clouds"] = nlohmann::ordered_json::array();
    for (std::size_t p = 0; p < clouds.size(); ++p) {
        const auto& cloud = clouds[p];
        const std::string gt_name = cloud.cloud_id + ".gt.sgl";
        const std::string pred_name = cloud.cloud_id + ".pred.sgl";
        const std::string inst_name = cloud.cloud_id + ".inst.sgi";
        write_label_file(dir / gt_name, cloud.gt, LabelKind::Label, LabelFormat::Binary);
        write_label_file(dir / pred_name, predictions[p], LabelKind::Label,
                         LabelFormat::Binary);
        write_label_file(dir / inst_name, cloud.instances, LabelKind::Instance,
                         LabelFormat::Binary);
        doc["clouds"].push_back({{"cloud_id", cloud.cloud_id},
                                 {"gt_path", gt_name},
                                 {"pred_path", pred_name},
                                 {"instance_path", inst_name}});
    }

    summary.manifest_path = dir / "dataset.segm.json";
    std::ofstream out(summary.manifest_path, std::ios::trunc);
    if (!out)
        throw IoError("cannot write manifest '" + summary.manifest_path.string() + "'");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + summary.manifest_path.string() + "'");
    return summary;
}

} // namespace segeval
