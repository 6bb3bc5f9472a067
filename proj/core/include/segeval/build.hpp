#pragma once

#include "segeval/manifest.hpp"
#include "segeval/types.hpp"

namespace segeval {

struct BuildOptions {
    /// Worker threads for per-cloud accumulation; 0 picks the hardware
    /// concurrency. The result is identical for every thread count.
    unsigned threads = 1;
    /// Values read per chunk and per stream; memory stays proportional
    /// to this, not to the cloud size.
    std::size_t chunk_size = 1 << 16;
};

/// Accumulate every cloud named by the manifest into canonical stats.
/// Clouds with zero valid points are skipped and recorded. Any per-cloud
/// failure aborts the build with the cloud id attached.
DatasetStats build_stats(const Manifest& manifest, const MetricConfig& config,
                         const BuildOptions& options = {});

} // namespace segeval
