#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "segeval/build.hpp"
#include "segeval/error.hpp"
#include "segeval/manifest.hpp"
#include "segeval/report.hpp"
#include "segeval/synth.hpp"

namespace {

struct ConfigFlags {
    std::string null_mode = "gt-absent";
    std::string acc_mode = "paper";
    std::string instance_tn_mode = "cloud-level";
    std::uint32_t ignore_id = segeval::kDefaultIgnoreId;
    CLI::Option* ignore_opt = nullptr;

    void attach(CLI::App& cmd) {
        cmd.add_option("--null-mode", null_mode,
                       "When a category counts as absent: gt-absent|union-absent")
            ->default_str("gt-absent");
        cmd.add_option("--acc-mode", acc_mode, "Accuracy formula: paper|recall")
            ->default_str("paper");
        cmd.add_option("--instance-tn-mode", instance_tn_mode,
                       "Per-instance tn term: cloud-level|allocated")
            ->default_str("cloud-level");
        ignore_opt = cmd.add_option("--ignore-id", ignore_id,
                                    "Category id treated as unlabeled "
                                    "(default: the manifest's ignore_id)");
    }

    segeval::MetricConfig resolve(std::uint32_t manifest_ignore_id) const {
        segeval::MetricConfig config;
        config.ignore_id = ignore_opt->count() > 0 ? ignore_id : manifest_ignore_id;
        config.null_mode = segeval::parse_null_mode(null_mode);
        config.acc_mode = segeval::parse_acc_mode(acc_mode);
        config.instance_tn_mode = segeval::parse_instance_tn_mode(instance_tn_mode);
        return config;
    }
};

void write_output(const std::string& out_path, auto&& writer) {
    if (out_path.empty()) {
        writer(std::cout);
        return;
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw segeval::IoError("cannot write '" + out_path + "'");
    writer(out);
    if (!out) throw segeval::IoError("write failed for '" + out_path + "'");
}

int run_eval(const std::string& manifest_path, const std::string& method,
             const std::string& out_path, const std::string& format,
             const ConfigFlags& flags, unsigned threads) {
    const segeval::Manifest manifest = segeval::load_manifest(manifest_path);
    const segeval::MetricConfig config = flags.resolve(manifest.ignore_id);
    segeval::BuildOptions options;
    options.threads = threads;
    const segeval::DatasetStats stats = segeval::build_stats(manifest, config, options);
    const segeval::MethodReport report = segeval::build_report(
        method, stats, config, manifest.category_names.value_or(std::vector<std::string>{}));

    for (const auto& skipped : report.diagnostics.ingest_skipped_clouds)
        std::cerr << "warning: cloud '" << skipped << "' has no valid points, skipped\n";
    if (report.diagnostics.uninstanced_points > 0)
        std::cerr << "warning: " << report.diagnostics.uninstanced_points
                  << " labeled points carry no instance id\n";
    if (report.diagnostics.unattributed_fp_pairs > 0)
        std::cerr << "warning: " << report.diagnostics.unattributed_fp_pairs
                  << " (cloud, category) pairs have fp but no instances to absorb it\n";

    const segeval::MethodReport reports[] = {report};
    write_output(out_path, [&](std::ostream& out) {
        segeval::write_reports(reports, segeval::parse_report_format(format), out);
    });
    return 0;
}

int run_rank(const std::vector<std::string>& report_paths, const std::string& table_path,
             const std::string& pair, const std::string& out_path,
             const std::string& format) {
    segeval::ValueTable table;
    if (!table_path.empty()) {
        table = segeval::read_value_csv(table_path);
    } else {
        std::vector<segeval::MethodReport> reports;
        for (const auto& path : report_paths)
            for (auto& report : segeval::read_reports(path))
                reports.push_back(std::move(report));
        table = segeval::table_from_reports(reports);
    }

    const auto colon = pair.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == pair.size())
        throw segeval::InputError("--pair expects 'metricA:metricB', got '" + pair + "'");
    const auto comparison = segeval::rank_methods(table, pair.substr(0, colon),
                                                  pair.substr(colon + 1));

    write_output(out_path, [&](std::ostream& out) {
        segeval::write_rank(comparison, segeval::parse_report_format(format), out);
    });
    return 0;
}

int run_synth(const segeval::SynthSpec& spec, const std::string& emit_dir) {
    const auto summary = segeval::emit_dataset(spec, emit_dir);
    std::cerr << "emitted " << summary.num_clouds << " clouds, " << summary.num_points
              << " points to '" << emit_dir << "'\n";
    return 0;
}

int run_validate(const std::string& manifest_path, const ConfigFlags& flags,
                 unsigned threads) {
    const segeval::Manifest manifest = segeval::load_manifest(manifest_path);
    const segeval::MetricConfig config = flags.resolve(manifest.ignore_id);
    segeval::BuildOptions options;
    options.threads = threads;
    const segeval::DatasetStats stats = segeval::build_stats(manifest, config, options);

    std::uint64_t uninstanced = 0;
    std::uint64_t with_instances = 0;
    for (const auto& cloud : stats.clouds) {
        uninstanced += cloud.uninstanced_points;
        if (cloud.has_instance_data) ++with_instances;
    }
    std::cerr << "manifest ok: " << stats.clouds.size() << " clouds, "
              << stats.num_categories << " categories, " << stats.total_valid_points()
              << " valid points\n";
    std::cerr << "clouds with instance data: " << with_instances << "\n";
    for (const auto& skipped : stats.skipped_clouds)
        std::cerr << "warning: cloud '" << skipped << "' has no valid points\n";
    if (uninstanced > 0)
        std::cerr << "warning: " << uninstanced << " labeled points carry no instance id\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fine-grained evaluation of point cloud semantic segmentation"};
    app.require_subcommand(1);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate predictions against a manifest");
    std::string eval_manifest, eval_method, eval_out, eval_format = "json";
    unsigned eval_threads = 0;
    ConfigFlags eval_flags;
    eval_cmd->add_option("--manifest", eval_manifest, "Dataset manifest (.segm.json)")
        ->required();
    eval_cmd->add_option("--method", eval_method, "Method name for the report")->required();
    eval_cmd->add_option("--out", eval_out, "Output path (default: stdout)");
    eval_cmd->add_option("--format", eval_format, "Output format: json|csv|table")
        ->default_str("json");
    eval_cmd->add_option("--threads", eval_threads,
                         "Worker threads (0 = hardware concurrency)");
    eval_flags.attach(*eval_cmd);

    // rank
    auto* rank_cmd = app.add_subcommand("rank", "Compare method rankings across metrics");
    std::vector<std::string> rank_reports;
    std::string rank_table, rank_pair, rank_out, rank_format = "table";
    rank_cmd->add_option("--reports", rank_reports, "Report json files (two or more)")
        ->expected(-1);
    rank_cmd->add_option("--table", rank_table, "Values csv (method + metric columns)")
        ->excludes("--reports");
    rank_cmd->add_option("--pair", rank_pair, "Metric pair, e.g. mIoU^D:mIoU^C")->required();
    rank_cmd->add_option("--out", rank_out, "Output path (default: stdout)");
    rank_cmd->add_option("--format", rank_format, "Output format: json|csv|table")
        ->default_str("table");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
    segeval::SynthSpec spec;
    std::string synth_emit;
    synth_cmd->add_option("--seed", spec.seed, "Generator seed")->default_str("0");
    synth_cmd->add_option("--clouds", spec.num_clouds, "Number of clouds")->default_str("1");
    synth_cmd->add_option("--categories", spec.num_categories, "Number of categories")
        ->default_str("1");
    synth_cmd
        ->add_option("--frequency", spec.category_frequency,
                     "Per-category presence probability (comma separated)")
        ->delimiter(',');
    synth_cmd->add_option("--size-min", spec.instance_size_law.min_points,
                          "Smallest instance size");
    synth_cmd->add_option("--size-max", spec.instance_size_law.max_points,
                          "Largest instance size");
    synth_cmd->add_option("--skew", spec.instance_size_law.skew,
                          "Size skew exponent (high = rare huge instances)");
    synth_cmd->add_option("--instances-min", spec.instances_per_category.min_instances,
                          "Fewest instances per present category");
    synth_cmd->add_option("--instances-max", spec.instances_per_category.max_instances,
                          "Most instances per present category");
    synth_cmd
        ->add_option("--miss-rate", spec.error_model.miss_rate,
                     "Per-category corruption probability (comma separated)")
        ->delimiter(',');
    synth_cmd
        ->add_option("--confusion-target", spec.error_model.confusion_target,
                     "Per-category wrong label (comma separated)")
        ->delimiter(',');
    synth_cmd->add_flag("--size-targeted", spec.error_model.size_targeted,
                        "Never corrupt the largest instance of each (cloud, category)");
    synth_cmd->add_option("--emit", synth_emit, "Output directory")->required();

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "Check a manifest and its files");
    std::string validate_manifest;
    unsigned validate_threads = 0;
    ConfigFlags validate_flags;
    validate_cmd->add_option("--manifest", validate_manifest, "Dataset manifest")->required();
    validate_cmd->add_option("--threads", validate_threads,
                             "Worker threads (0 = hardware concurrency)");
    validate_flags.attach(*validate_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (eval_cmd->parsed())
            return run_eval(eval_manifest, eval_method, eval_out, eval_format, eval_flags,
                            eval_threads);
        if (rank_cmd->parsed()) {
            if (rank_reports.empty() && rank_table.empty())
                throw segeval::InputError("rank needs --reports or --table");
            return run_rank(rank_reports, rank_table, rank_pair, rank_out, rank_format);
        }
        if (synth_cmd->parsed()) return run_synth(spec, synth_emit);
        if (validate_cmd->parsed())
            return run_validate(validate_manifest, validate_flags, validate_threads);
    } catch (const segeval::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
