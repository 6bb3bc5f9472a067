#include "segeval/build.hpp"

#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

#include "segeval/accumulate.hpp"
#include "segeval/error.hpp"
#include "segeval/label_io.hpp"

namespace segeval {

namespace {

std::string with_cloud(const std::string& cloud_id, const char* what) {
    const std::string prefix = "cloud '" + cloud_id + "'";
    if (std::string_view(what).find(prefix) != std::string_view::npos) return what;
    return prefix + ": " + what;
}

CloudStats accumulate_cloud_impl(const CloudEntry& entry, const MetricConfig& config,
                                 std::uint32_t num_categories, std::size_t chunk_size) {
    const bool with_instances = entry.instance_path.has_value();
    CloudAccumulator acc(entry.cloud_id, num_categories, config, with_instances);

    LabelFileReader gt(entry.gt_path, LabelFormat::Auto, LabelKind::Label);
    LabelFileReader pred(entry.pred_path, LabelFormat::Auto, LabelKind::Label);
    std::optional<LabelFileReader> inst;
    if (with_instances)
        inst.emplace(*entry.instance_path, LabelFormat::Auto, LabelKind::Instance);

    std::vector<std::uint32_t> gt_buf(chunk_size), pred_buf(chunk_size), inst_buf;
    if (with_instances) inst_buf.resize(chunk_size);

    while (true) {
        const std::size_t n_gt = gt.read_chunk(gt_buf);
        const std::size_t n_pred = pred.read_chunk(pred_buf);
        if (n_gt != n_pred)
            throw InputError("cloud '" + entry.cloud_id +
                             "': ground truth and prediction files disagree in length");
        std::size_t n_inst = 0;
        if (with_instances) {
            n_inst = inst->read_chunk(inst_buf);
            if (n_inst != n_gt)
                throw InputError("cloud '" + entry.cloud_id +
                                 "': instance file length does not match ground truth");
        }
        if (n_gt == 0) break;
        acc.update(std::span(gt_buf).first(n_gt), std::span(pred_buf).first(n_pred),
                   with_instances ? std::span<const std::uint32_t>(inst_buf).first(n_inst)
                                  : std::span<const std::uint32_t>());
    }
    return acc.finish();
}

// Every failure under a cloud names that cloud, including file errors
// that only know their path.
CloudStats accumulate_cloud(const CloudEntry& entry, const MetricConfig& config,
                            std::uint32_t num_categories, std::size_t chunk_size) {
    try {
        return accumulate_cloud_impl(entry, config, num_categories, chunk_size);
    } catch (const InputError& e) {
        throw InputError(with_cloud(entry.cloud_id, e.what()));
    } catch (const IoError& e) {
        throw IoError(with_cloud(entry.cloud_id, e.what()));
    }
}

} // namespace

DatasetStats build_stats(const Manifest& manifest, const MetricConfig& config,
                         const BuildOptions& options) {
    if (options.chunk_size == 0) throw ConfigError("chunk_size must be at least 1");
    unsigned threads = options.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max<std::size_t>(manifest.clouds.size(), 1));

    std::vector<std::optional<CloudStats>> results(manifest.clouds.size());
    std::vector<std::exception_ptr> failures(manifest.clouds.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= manifest.clouds.size()) return;
            try {
                results[i] = accumulate_cloud(manifest.clouds[i], config,
                                              manifest.num_categories, options.chunk_size);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Report the first failure in manifest order, independent of schedule.
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);

    DatasetStats collected;
    collected.num_categories = manifest.num_categories;
    collected.config_fingerprint = config.fingerprint();
    for (auto& result : results) {
        if (result->valid_points == 0) {
            collected.skipped_clouds.push_back(result->cloud_id);
            continue;
        }
        collected.clouds.push_back(std::move(*result));
    }

    DatasetStats empty;
    empty.num_categories = collected.num_categories;
    empty.config_fingerprint = collected.config_fingerprint;
    return merge(empty, collected); // canonical ordering and duplicate check
}

} // namespace segeval
