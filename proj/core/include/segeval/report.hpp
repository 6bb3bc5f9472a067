#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "segeval/metrics.hpp"
#include "segeval/types.hpp"

namespace segeval {

/// Canonical metric names, in report column order:
/// OA, mIoU^D, mIoU^P, mIoU^C, mIoU^I, mAcc^D, mAcc^P, mAcc^C, mAcc^I.
std::span<const std::string_view> metric_names();

struct Diagnostics {
    std::uint64_t dataset_null_categories_iou = 0;
    std::uint64_t dataset_null_categories_acc = 0;
    std::uint64_t cloud_first_skipped_clouds_iou = 0;
    std::uint64_t cloud_first_skipped_clouds_acc = 0;
    std::vector<std::string> ingest_skipped_clouds;
    std::uint64_t uninstanced_points = 0;
    std::uint64_t unattributed_fp_pairs = 0;
    std::uint64_t unattributed_fp_points = 0;

    bool operator==(const Diagnostics&) const = default;
};

/// Every metric level for one evaluated method, plus enough metadata to
/// make the numbers self-describing. Values stay at full precision;
/// rounding happens only in the table renderer.
struct MethodReport {
    std::string method_name;
    MetricConfig config;
    std::string config_fingerprint;
    std::uint32_t num_categories = 0;
    std::vector<std::string> category_names; ///< empty when unnamed
    std::vector<std::string> cloud_ids;
    double overall_accuracy = 0.0;
    LevelResult iou_dataset, iou_cloud_first, iou_category_first, iou_instance;
    LevelResult acc_dataset, acc_cloud_first, acc_category_first, acc_instance;
    Diagnostics diagnostics;

    bool operator==(const MethodReport&) const = default;
};

/// Run every metric level once over the stats.
MethodReport build_report(std::string method_name, const DatasetStats& stats,
                          const MetricConfig& config,
                          std::vector<std::string> category_names = {});

/// Summary value for one of the canonical metric names.
MetricValue summary_by_name(const MethodReport& report, std::string_view name);

enum class ReportFormat { Json, Csv, Table };

ReportFormat parse_report_format(std::string_view text);

/// Serialize reports: json keeps full precision and a stable key order;
/// csv emits one row per method; table renders percent with one decimal
/// for side-by-side reading. Refuses reports with mismatched config
/// fingerprints.
void write_reports(std::span<const MethodReport> reports, ReportFormat format,
                   std::ostream& out);
void write_reports(std::span<const MethodReport> reports, ReportFormat format,
                   const std::filesystem::path& path);

/// Read back a single json report (object form).
MethodReport read_report(const std::filesystem::path& path);
/// Read one or many json reports (object or array form).
std::vector<MethodReport> read_reports(const std::filesystem::path& path);

/// Method-by-metric value matrix, the input to ranking. Built from
/// reports or loaded from a csv of published numbers.
struct ValueTable {
    std::vector<std::string> metrics;
    struct Row {
        std::string method;
        std::vector<MetricValue> values;
    };
    std::vector<Row> rows;
};

ValueTable table_from_reports(std::span<const MethodReport> reports);
ValueTable read_value_csv(const std::filesystem::path& path);

/// Tie-adjusted Kendall tau-b of two paired score or rank lists.
/// Returns 0 when either list is entirely tied.
double kendall_tau(std::span<const double> a, std::span<const double> b);

/// Ranks by descending value, 1 = best; tied values share the average rank.
std::vector<double> rank_descending(std::span<const double> values);

/// How two metrics order the same methods.
struct RankComparison {
    std::string metric_a;
    std::string metric_b;
    std::vector<std::string> methods;
    std::vector<double> values_a, values_b;
    std::vector<double> ranks_a, ranks_b;
    double tau = 0.0;
    /// Method pairs the two metrics order oppositely.
    std::vector<std::pair<std::string, std::string>> discordant_pairs;
};

RankComparison rank_methods(const ValueTable& table, std::string_view metric_a,
                            std::string_view metric_b);

void write_rank(const RankComparison& comparison, ReportFormat format,
                std::ostream& out);

} // namespace segeval
