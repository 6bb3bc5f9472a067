#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "segeval/accumulate.hpp"
#include "segeval/metrics.hpp"
#include "segeval/synth.hpp"

using namespace segeval;

namespace {

struct Fixture {
    std::vector<SynthCloud> clouds;
    std::vector<LabelArray> preds;
    DatasetStats stats;
    MetricConfig config;
    std::uint32_t num_categories = 12;

    Fixture() {
        SynthSpec spec;
        spec.seed = 1;
        spec.num_clouds = 8;
        spec.num_categories = num_categories;
        spec.instance_size_law = {200, 20000, 2.0};
        spec.instances_per_category = {1, 4};
        spec.error_model.miss_rate = std::vector<double>(num_categories, 0.15);
        clouds = generate(spec);
        preds = corrupt(clouds, spec.error_model, spec.seed, num_categories);

        stats.num_categories = num_categories;
        stats.config_fingerprint = config.fingerprint();
        for (std::size_t i = 0; i < clouds.size(); ++i) {
            CloudAccumulator acc(clouds[i].cloud_id, num_categories, config, true);
            acc.update(clouds[i].gt, preds[i], clouds[i].instances);
            stats.clouds.push_back(acc.finish());
        }
    }

    std::uint64_t total_points() const {
        std::uint64_t n = 0;
        for (const auto& cloud : clouds) n += cloud.gt.size();
        return n;
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_accumulate(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        for (std::size_t i = 0; i < f.clouds.size(); ++i) {
            CloudAccumulator acc(f.clouds[i].cloud_id, f.num_categories, f.config, true);
            acc.update(f.clouds[i].gt, f.preds[i], f.clouds[i].instances);
            benchmark::DoNotOptimize(acc.finish());
        }
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(f.total_points()));
}
BENCHMARK(BM_accumulate)->Unit(benchmark::kMillisecond);

void BM_metrics_all_levels(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        for (const auto kind : {MetricKind::Iou, MetricKind::Acc}) {
            benchmark::DoNotOptimize(metric_dataset_level(kind, f.stats, f.config));
            benchmark::DoNotOptimize(metric_cloud_first(kind, f.stats, f.config));
            benchmark::DoNotOptimize(metric_category_first(kind, f.stats, f.config));
            benchmark::DoNotOptimize(metric_instance_level(kind, f.stats, f.config));
        }
        benchmark::DoNotOptimize(overall_accuracy(f.stats));
    }
}
BENCHMARK(BM_metrics_all_levels)->Unit(benchmark::kMicrosecond);

void BM_merge(benchmark::State& state) {
    const auto& f = fixture();
    DatasetStats left, right;
    left.num_categories = right.num_categories = f.num_categories;
    left.config_fingerprint = right.config_fingerprint = f.config.fingerprint();
    for (std::size_t i = 0; i < f.stats.clouds.size(); ++i)
        (i % 2 == 0 ? left : right).clouds.push_back(f.stats.clouds[i]);
    for (auto _ : state) benchmark::DoNotOptimize(merge(left, right));
}
BENCHMARK(BM_merge)->Unit(benchmark::kMicrosecond);

void BM_corrupt(benchmark::State& state) {
    const auto& f = fixture();
    SynthSpec::ErrorModel model;
    model.miss_rate = std::vector<double>(f.num_categories, 0.15);
    for (auto _ : state)
        benchmark::DoNotOptimize(corrupt(f.clouds, model, 7, f.num_categories));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(f.total_points()));
}
BENCHMARK(BM_corrupt)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
