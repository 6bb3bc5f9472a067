#include "segeval/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "segeval/error.hpp"

namespace segeval {

namespace {

using nlohmann::ordered_json;

constexpr std::array<std::string_view, 9> kMetricNames = {
    "OA",     "mIoU^D", "mIoU^P", "mIoU^C", "mIoU^I",
    "mAcc^D", "mAcc^P", "mAcc^C", "mAcc^I",
};

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_cell(const MetricValue& v) {
    return v.has_value() ? format_double(*v) : "NULL";
}

std::string format_percent(const MetricValue& v) {
    if (!v.has_value()) return "NULL";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", *v * 100.0);
    return buf;
}

std::uint64_t count_nulls(const std::vector<MetricValue>& values) {
    std::uint64_t n = 0;
    for (const auto& v : values)
        if (!v.has_value()) ++n;
    return n;
}

ordered_json values_to_json(const std::vector<MetricValue>& values) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : values) {
        if (v.has_value()) arr.push_back(*v);
        else arr.push_back(nullptr);
    }
    return arr;
}

std::vector<MetricValue> values_from_json(const ordered_json& arr) {
    std::vector<MetricValue> values;
    values.reserve(arr.size());
    for (const auto& v : arr) {
        if (v.is_null()) values.emplace_back(std::nullopt);
        else values.emplace_back(v.get<double>());
    }
    return values;
}

ordered_json level_to_json(const LevelResult& level) {
    ordered_json j;
    if (!level.per_category.empty()) j["per_category"] = values_to_json(level.per_category);
    if (!level.per_cloud.empty()) j["per_cloud"] = values_to_json(level.per_cloud);
    j["summary"] = level.summary.has_value() ? ordered_json(*level.summary)
                                             : ordered_json(nullptr);
    return j;
}

LevelResult level_from_json(const ordered_json& j) {
    LevelResult level;
    if (j.contains("per_category")) level.per_category = values_from_json(j["per_category"]);
    if (j.contains("per_cloud")) level.per_cloud = values_from_json(j["per_cloud"]);
    const auto& summary = j.at("summary");
    if (!summary.is_null()) level.summary = summary.get<double>();
    return level;
}

ordered_json report_to_json(const MethodReport& report) {
    ordered_json j;
    j["method"] = report.method_name;
    j["config"] = {{"ignore_id", report.config.ignore_id},
                   {"null_mode", to_string(report.config.null_mode)},
                   {"acc_mode", to_string(report.config.acc_mode)},
                   {"instance_tn_mode", to_string(report.config.instance_tn_mode)},
                   {"fingerprint", report.config_fingerprint}};
    j["num_categories"] = report.num_categories;
    if (!report.category_names.empty()) j["category_names"] = report.category_names;
    j["cloud_ids"] = report.cloud_ids;
    j["overall_accuracy"] = report.overall_accuracy;
    j["metrics"] = {{"iou",
                     {{"dataset", level_to_json(report.iou_dataset)},
                      {"cloud_first", level_to_json(report.iou_cloud_first)},
                      {"category_first", level_to_json(report.iou_category_first)},
                      {"instance", level_to_json(report.iou_instance)}}},
                    {"acc",
                     {{"dataset", level_to_json(report.acc_dataset)},
                      {"cloud_first", level_to_json(report.acc_cloud_first)},
                      {"category_first", level_to_json(report.acc_category_first)},
                      {"instance", level_to_json(report.acc_instance)}}}};
    j["diagnostics"] = {
        {"dataset_null_categories_iou", report.diagnostics.dataset_null_categories_iou},
        {"dataset_null_categories_acc", report.diagnostics.dataset_null_categories_acc},
        {"cloud_first_skipped_clouds_iou",
         report.diagnostics.cloud_first_skipped_clouds_iou},
        {"cloud_first_skipped_clouds_acc",
         report.diagnostics.cloud_first_skipped_clouds_acc},
        {"ingest_skipped_clouds", report.diagnostics.ingest_skipped_clouds},
        {"uninstanced_points", report.diagnostics.uninstanced_points},
        {"unattributed_fp_pairs", report.diagnostics.unattributed_fp_pairs},
        {"unattributed_fp_points", report.diagnostics.unattributed_fp_points}};
    return j;
}

MethodReport report_from_json(const ordered_json& j) {
    MethodReport report;
    try {
        report.method_name = j.at("method").get<std::string>();
        const auto& config = j.at("config");
        report.config.ignore_id = config.at("ignore_id").get<std::uint32_t>();
        report.config.null_mode = parse_null_mode(config.at("null_mode").get<std::string>());
        report.config.acc_mode = parse_acc_mode(config.at("acc_mode").get<std::string>());
        report.config.instance_tn_mode =
            parse_instance_tn_mode(config.at("instance_tn_mode").get<std::string>());
        report.config_fingerprint = config.at("fingerprint").get<std::string>();
        report.num_categories = j.at("num_categories").get<std::uint32_t>();
        if (j.contains("category_names"))
            report.category_names = j.at("category_names").get<std::vector<std::string>>();
        report.cloud_ids = j.at("cloud_ids").get<std::vector<std::string>>();
        report.overall_accuracy = j.at("overall_accuracy").get<double>();

        const auto& iou = j.at("metrics").at("iou");
        report.iou_dataset = level_from_json(iou.at("dataset"));
        report.iou_cloud_first = level_from_json(iou.at("cloud_first"));
        report.iou_category_first = level_from_json(iou.at("category_first"));
        report.iou_instance = level_from_json(iou.at("instance"));
        const auto& acc = j.at("metrics").at("acc");
        report.acc_dataset = level_from_json(acc.at("dataset"));
        report.acc_cloud_first = level_from_json(acc.at("cloud_first"));
        report.acc_category_first = level_from_json(acc.at("category_first"));
        report.acc_instance = level_from_json(acc.at("instance"));

        const auto& diag = j.at("diagnostics");
        report.diagnostics.dataset_null_categories_iou =
            diag.at("dataset_null_categories_iou").get<std::uint64_t>();
        report.diagnostics.dataset_null_categories_acc =
            diag.at("dataset_null_categories_acc").get<std::uint64_t>();
        report.diagnostics.cloud_first_skipped_clouds_iou =
            diag.at("cloud_first_skipped_clouds_iou").get<std::uint64_t>();
        report.diagnostics.cloud_first_skipped_clouds_acc =
            diag.at("cloud_first_skipped_clouds_acc").get<std::uint64_t>();
        report.diagnostics.ingest_skipped_clouds =
            diag.at("ingest_skipped_clouds").get<std::vector<std::string>>();
        report.diagnostics.uninstanced_points =
            diag.at("uninstanced_points").get<std::uint64_t>();
        report.diagnostics.unattributed_fp_pairs =
            diag.at("unattributed_fp_pairs").get<std::uint64_t>();
        report.diagnostics.unattributed_fp_points =
            diag.at("unattributed_fp_points").get<std::uint64_t>();
    } catch (const ordered_json::exception& e) {
        throw InputError(std::string("malformed report document: ") + e.what());
    }
    return report;
}

void require_same_fingerprint(std::span<const MethodReport> reports) {
    for (std::size_t i = 1; i < reports.size(); ++i)
        if (reports[i].config_fingerprint != reports[0].config_fingerprint)
            throw ConfigError("config mismatch between reports '" +
                              reports[0].method_name + "' and '" +
                              reports[i].method_name + "' ('" +
                              reports[0].config_fingerprint + "' vs '" +
                              reports[i].config_fingerprint + "')");
}

void write_reports_csv(std::span<const MethodReport> reports, std::ostream& out) {
    out << "method";
    for (const auto name : kMetricNames) out << ',' << name;
    out << '\n';
    for (const auto& report : reports) {
        out << report.method_name;
        for (const auto name : kMetricNames)
            out << ',' << format_cell(summary_by_name(report, name));
        out << '\n';
    }
}

void write_reports_table(std::span<const MethodReport> reports, std::ostream& out) {
    std::size_t method_width = 6; // "Method"
    for (const auto& report : reports)
        method_width = std::max(method_width, report.method_name.size());

    // mIoU columns first, then mAcc, OA last.
    const std::array<std::string_view, 9> order = {
        "mIoU^D", "mIoU^P", "mIoU^C", "mIoU^I",
        "mAcc^D", "mAcc^P", "mAcc^C", "mAcc^I", "OA",
    };
    std::ostringstream line;
    line << "Method" << std::string(method_width - 6, ' ');
    for (const auto name : order)
        line << "  " << std::string(8 - name.size(), ' ') << name;
    out << line.str() << '\n';
    for (const auto& report : reports) {
        out << report.method_name
            << std::string(method_width - report.method_name.size(), ' ');
        for (const auto name : order) {
            const std::string cell = format_percent(summary_by_name(report, name));
            out << "  " << std::string(cell.size() < 8 ? 8 - cell.size() : 0, ' ') << cell;
        }
        out << '\n';
    }
}

} // namespace

std::span<const std::string_view> metric_names() { return kMetricNames; }

MethodReport build_report(std::string method_name, const DatasetStats& stats,
                          const MetricConfig& config,
                          std::vector<std::string> category_names) {
    if (stats.config_fingerprint != config.fingerprint())
        throw ConfigError("stats were accumulated under config '" +
                          stats.config_fingerprint + "' but the report asks for '" +
                          config.fingerprint() + "'");
    if (!category_names.empty() && category_names.size() != stats.num_categories)
        throw InputError("category_names has " + std::to_string(category_names.size()) +
                         " entries, expected " + std::to_string(stats.num_categories));

    MethodReport report;
    report.method_name = std::move(method_name);
    report.config = config;
    report.config_fingerprint = config.fingerprint();
    report.num_categories = stats.num_categories;
    report.category_names = std::move(category_names);
    for (const auto& cloud : stats.clouds) report.cloud_ids.push_back(cloud.cloud_id);

    report.overall_accuracy = overall_accuracy(stats);
    report.iou_dataset = metric_dataset_level(MetricKind::Iou, stats, config);
    report.iou_cloud_first = metric_cloud_first(MetricKind::Iou, stats, config);
    report.iou_category_first = metric_category_first(MetricKind::Iou, stats, config);
    report.iou_instance = metric_instance_level(MetricKind::Iou, stats, config);
    report.acc_dataset = metric_dataset_level(MetricKind::Acc, stats, config);
    report.acc_cloud_first = metric_cloud_first(MetricKind::Acc, stats, config);
    report.acc_category_first = metric_category_first(MetricKind::Acc, stats, config);
    report.acc_instance = metric_instance_level(MetricKind::Acc, stats, config);

    report.diagnostics.dataset_null_categories_iou =
        count_nulls(report.iou_dataset.per_category);
    report.diagnostics.dataset_null_categories_acc =
        count_nulls(report.acc_dataset.per_category);
    report.diagnostics.cloud_first_skipped_clouds_iou =
        count_nulls(report.iou_cloud_first.per_cloud);
    report.diagnostics.cloud_first_skipped_clouds_acc =
        count_nulls(report.acc_cloud_first.per_cloud);
    report.diagnostics.ingest_skipped_clouds = stats.skipped_clouds;
    const InstanceDiagnostics inst = instance_diagnostics(stats);
    report.diagnostics.uninstanced_points = inst.uninstanced_points;
    report.diagnostics.unattributed_fp_pairs = inst.unattributed_fp_pairs;
    report.diagnostics.unattributed_fp_points = inst.unattributed_fp_points;
    return report;
}

MetricValue summary_by_name(const MethodReport& report, std::string_view name) {
    if (name == "OA") return report.overall_accuracy;
    if (name == "mIoU^D") return report.iou_dataset.summary;
    if (name == "mIoU^P") return report.iou_cloud_first.summary;
    if (name == "mIoU^C") return report.iou_category_first.summary;
    if (name == "mIoU^I") return report.iou_instance.summary;
    if (name == "mAcc^D") return report.acc_dataset.summary;
    if (name == "mAcc^P") return report.acc_cloud_first.summary;
    if (name == "mAcc^C") return report.acc_category_first.summary;
    if (name == "mAcc^I") return report.acc_instance.summary;
    throw InputError("unknown metric name '" + std::string(name) + "'");
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "json") return ReportFormat::Json;
    if (text == "csv") return ReportFormat::Csv;
    if (text == "table") return ReportFormat::Table;
    throw ConfigError("unknown report format '" + std::string(text) +
                      "' (expected json, csv or table)");
}

void write_reports(std::span<const MethodReport> reports, ReportFormat format,
                   std::ostream& out) {
    require_same_fingerprint(reports);
    switch (format) {
    case ReportFormat::Json: {
        if (reports.size() == 1) {
            out << report_to_json(reports[0]).dump(2) << '\n';
        } else {
            ordered_json arr = ordered_json::array();
            for (const auto& report : reports) arr.push_back(report_to_json(report));
            out << arr.dump(2) << '\n';
        }
        break;
    }
    case ReportFormat::Csv:
        write_reports_csv(reports, out);
        break;
    case ReportFormat::Table:
        write_reports_table(reports, out);
        break;
    }
    if (!out) throw IoError("report write failed");
}

void write_reports(std::span<const MethodReport> reports, ReportFormat format,
                   const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write report '" + path.string() + "'");
    write_reports(reports, format, out);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<MethodReport> read_reports(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report '" + path.string() + "'");
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const ordered_json::parse_error& e) {
        throw InputError("report '" + path.string() + "': " + e.what());
    }
    std::vector<MethodReport> reports;
    if (doc.is_array()) {
        for (const auto& item : doc) reports.push_back(report_from_json(item));
    } else {
        reports.push_back(report_from_json(doc));
    }
    return reports;
}

MethodReport read_report(const std::filesystem::path& path) {
    auto reports = read_reports(path);
    if (reports.size() != 1)
        throw InputError("report '" + path.string() + "' holds " +
                         std::to_string(reports.size()) + " reports, expected one");
    return std::move(reports[0]);
}

ValueTable table_from_reports(std::span<const MethodReport> reports) {
    require_same_fingerprint(reports);
    ValueTable table;
    table.metrics.assign(kMetricNames.begin(), kMetricNames.end());
    for (const auto& report : reports) {
        ValueTable::Row row;
        row.method = report.method_name;
        for (const auto name : kMetricNames)
            row.values.push_back(summary_by_name(report, name));
        table.rows.push_back(std::move(row));
    }
    return table;
}

ValueTable read_value_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open value table '" + path.string() + "'");

    auto split = [](const std::string& line) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream stream(line);
        while (std::getline(stream, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        return fields;
    };

    std::string line;
    std::size_t line_number = 0;
    ValueTable table;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line);
        if (table.metrics.empty()) {
            if (fields.size() < 2 || fields[0] != "method")
                throw InputError("'" + path.string() +
                                 "' line 1: header must start with 'method'");
            table.metrics.assign(fields.begin() + 1, fields.end());
            continue;
        }
        if (fields.size() != table.metrics.size() + 1)
            throw InputError("'" + path.string() + "' line " + std::to_string(line_number) +
                             ": expected " + std::to_string(table.metrics.size() + 1) +
                             " fields, got " + std::to_string(fields.size()));
        ValueTable::Row row;
        row.method = fields[0];
        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (fields[i] == "NULL" || fields[i].empty()) {
                row.values.emplace_back(std::nullopt);
                continue;
            }
            double value = 0.0;
            const char* begin = fields[i].data();
            const char* end = begin + fields[i].size();
            const auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc() || ptr != end)
                throw InputError("'" + path.string() + "' line " +
                                 std::to_string(line_number) + ": invalid number '" +
                                 fields[i] + "'");
            row.values.emplace_back(value);
        }
        table.rows.push_back(std::move(row));
    }
    if (table.metrics.empty())
        throw InputError("'" + path.string() + "': empty value table");
    return table;
}

std::vector<double> rank_descending(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] > values[b];
    });

    std::vector<double> ranks(values.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        // Positions i..j-1 hold equal values; all get the average rank.
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InputError("kendall_tau: length mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    if (a.size() < 2) throw InputError("kendall_tau: need at least two items");

    const std::size_t n = a.size();
    std::int64_t concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double da = a[i] - a[j];
            const double db = b[i] - b[j];
            if (da == 0.0 && db == 0.0) {
                ++ties_a;
                ++ties_b;
            } else if (da == 0.0) {
                ++ties_a;
            } else if (db == 0.0) {
                ++ties_b;
            } else if ((da > 0.0) == (db > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const auto n0 = static_cast<std::int64_t>(n * (n - 1) / 2);
    if (n0 == ties_a || n0 == ties_b) return 0.0; // one side carries no order
    const double denom = std::sqrt(static_cast<double>(n0 - ties_a)) *
                         std::sqrt(static_cast<double>(n0 - ties_b));
    return static_cast<double>(concordant - discordant) / denom;
}

RankComparison rank_methods(const ValueTable& table, std::string_view metric_a,
                            std::string_view metric_b) {
    if (table.rows.size() < 2)
        throw InputError("rank comparison needs at least two methods, got " +
                         std::to_string(table.rows.size()));

    auto column_of = [&](std::string_view name) {
        const auto it = std::find(table.metrics.begin(), table.metrics.end(), name);
        if (it == table.metrics.end())
            throw InputError("metric '" + std::string(name) + "' not present in the table");
        return static_cast<std::size_t>(it - table.metrics.begin());
    };
    const std::size_t col_a = column_of(metric_a);
    const std::size_t col_b = column_of(metric_b);

    RankComparison cmp;
    cmp.metric_a = std::string(metric_a);
    cmp.metric_b = std::string(metric_b);
    for (const auto& row : table.rows) {
        const auto& va = row.values[col_a];
        const auto& vb = row.values[col_b];
        if (!va.has_value())
            throw InputError("method '" + row.method + "' has no value for metric '" +
                             std::string(metric_a) + "'");
        if (!vb.has_value())
            throw InputError("method '" + row.method + "' has no value for metric '" +
                             std::string(metric_b) + "'");
        cmp.methods.push_back(row.method);
        cmp.values_a.push_back(*va);
        cmp.values_b.push_back(*vb);
    }

    cmp.ranks_a = rank_descending(cmp.values_a);
    cmp.ranks_b = rank_descending(cmp.values_b);
    cmp.tau = kendall_tau(cmp.ranks_a, cmp.ranks_b);
    for (std::size_t i = 0; i < cmp.methods.size(); ++i) {
        for (std::size_t j = i + 1; j < cmp.methods.size(); ++j) {
            const double da = cmp.values_a[i] - cmp.values_a[j];
            const double db = cmp.values_b[i] - cmp.values_b[j];
            if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0))
                cmp.discordant_pairs.emplace_back(cmp.methods[i], cmp.methods[j]);
        }
    }
    return cmp;
}

void write_rank(const RankComparison& comparison, ReportFormat format,
                std::ostream& out) {
    switch (format) {
    case ReportFormat::Json: {
        ordered_json j;
        j["metric_a"] = comparison.metric_a;
        j["metric_b"] = comparison.metric_b;
        j["kendall_tau"] = comparison.tau;
        j["methods"] = ordered_json::array();
        for (std::size_t i = 0; i < comparison.methods.size(); ++i) {
            j["methods"].push_back({{"method", comparison.methods[i]},
                                    {"value_a", comparison.values_a[i]},
                                    {"rank_a", comparison.ranks_a[i]},
                                    {"value_b", comparison.values_b[i]},
                                    {"rank_b", comparison.ranks_b[i]}});
        }
        j["discordant_pairs"] = ordered_json::array();
        for (const auto& [x, y] : comparison.discordant_pairs)
            j["discordant_pairs"].push_back({x, y});
        out << j.dump(2) << '\n';
        break;
    }
    case ReportFormat::Csv: {
        out << "method," << comparison.metric_a << ",rank(" << comparison.metric_a << "),"
            << comparison.metric_b << ",rank(" << comparison.metric_b << ")\n";
        for (std::size_t i = 0; i < comparison.methods.size(); ++i)
            out << comparison.methods[i] << ',' << format_double(comparison.values_a[i])
                << ',' << format_double(comparison.ranks_a[i]) << ','
                << format_double(comparison.values_b[i]) << ','
                << format_double(comparison.ranks_b[i]) << '\n';
        break;
    }
    case ReportFormat::Table: {
        std::size_t width = 6;
        for (const auto& m : comparison.methods) width = std::max(width, m.size());
        out << "Rank comparison: " << comparison.metric_a << " vs " << comparison.metric_b
            << '\n';
        out << "Method" << std::string(width - 6, ' ') << "  " << comparison.metric_a
            << "  rank  " << comparison.metric_b << "  rank\n";
        char buf[64];
        for (std::size_t i = 0; i < comparison.methods.size(); ++i) {
            std::snprintf(buf, sizeof buf, "  %8.3f  %4.1f  %8.3f  %4.1f",
                          comparison.values_a[i], comparison.ranks_a[i],
                          comparison.values_b[i], comparison.ranks_b[i]);
            out << comparison.methods[i]
                << std::string(width - comparison.methods[i].size(), ' ') << buf << '\n';
        }
        std::snprintf(buf, sizeof buf, "%.4f", comparison.tau);
        out << "kendall_tau: " << buf << '\n';
        out << "discordant_pairs: " << comparison.discordant_pairs.size() << '\n';
        for (const auto& [x, y] : comparison.discordant_pairs)
            out << "  " << x << " <> " << y << '\n';
        break;
    }
    }
    if (!out) throw IoError("rank write failed");
}

} // namespace segeval
