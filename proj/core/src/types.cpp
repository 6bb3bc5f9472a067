#include "segeval/types.hpp"

#include <string>

#include "segeval/error.hpp"

namespace segeval {

std::string_view to_string(NullMode mode) {
    switch (mode) {
    case NullMode::GtAbsent: return "gt-absent";
    case NullMode::UnionAbsent: return "union-absent";
    }
    return "?";
}

std::string_view to_string(AccMode mode) {
    switch (mode) {
    case AccMode::Paper: return "paper";
    case AccMode::Recall: return "recall";
    }
    return "?";
}

std::string_view to_string(InstanceTnMode mode) {
    switch (mode) {
    case InstanceTnMode::CloudLevel: return "cloud-level";
    case InstanceTnMode::Allocated: return "allocated";
    }
    return "?";
}

NullMode parse_null_mode(std::string_view text) {
    if (text == "gt-absent") return NullMode::GtAbsent;
    if (text == "union-absent") return NullMode::UnionAbsent;
    throw ConfigError("unknown null mode '" + std::string(text) +
                      "' (expected gt-absent or union-absent)");
}

AccMode parse_acc_mode(std::string_view text) {
    if (text == "paper") return AccMode::Paper;
    if (text == "recall") return AccMode::Recall;
    throw ConfigError("unknown acc mode '" + std::string(text) +
                      "' (expected paper or recall)");
}

InstanceTnMode parse_instance_tn_mode(std::string_view text) {
    if (text == "cloud-level") return InstanceTnMode::CloudLevel;
    if (text == "allocated") return InstanceTnMode::Allocated;
    throw ConfigError("unknown instance tn mode '" + std::string(text) +
                      "' (expected cloud-level or allocated)");
}

std::string MetricConfig::fingerprint() const {
    std::string fp = "ignore=" + std::to_string(ignore_id);
    fp += "|null=";
    fp += to_string(null_mode);
    fp += "|acc=";
    fp += to_string(acc_mode);
    fp += "|itn=";
    fp += to_string(instance_tn_mode);
    return fp;
}

std::uint64_t DatasetStats::total_valid_points() const {
    std::uint64_t total = 0;
    for (const auto& cloud : clouds) total += cloud.valid_points;
    return total;
}

MetricValue null_skipping_mean(std::span<const MetricValue> values) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& v : values) {
        if (v.has_value()) {
            sum += *v;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

} // namespace segeval
