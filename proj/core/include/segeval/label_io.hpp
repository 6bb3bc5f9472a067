#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segeval/types.hpp"

namespace segeval {

enum class LabelFormat { Auto, Text, Binary };

/// Distinguishes semantic label files (magic "SGL1") from instance id
/// files (magic "SGI1"). Payload layout is identical: a little-endian
/// u32 count followed by that many little-endian u32 values.
enum class LabelKind { Label, Instance };

LabelFormat parse_label_format(std::string_view text);

/// Chunked reader over a label file, memory bounded by the chunk size.
/// Auto format sniffs the 4-byte magic; anything else is treated as text
/// (one nonnegative decimal integer per line).
class LabelFileReader {
public:
    LabelFileReader(const std::filesystem::path& path, LabelFormat format,
                    LabelKind kind);

    /// Count declared by a binary header; unknown for text files.
    std::optional<std::uint64_t> declared_count() const { return declared_count_; }

    /// Fill `out` with up to out.size() values; returns the number filled,
    /// 0 at end of file. Throws InputError on malformed content, with the
    /// line number (text) or byte offset (binary) of the problem.
    std::size_t read_chunk(std::span<std::uint32_t> out);

private:
    std::filesystem::path path_;
    std::ifstream in_;
    bool binary_ = false;
    std::optional<std::uint64_t> declared_count_;
    std::uint64_t values_read_ = 0;
    std::uint64_t byte_offset_ = 0;
    std::uint64_t line_number_ = 0;
    bool finished_ = false;

    std::size_t read_chunk_binary(std::span<std::uint32_t> out);
    std::size_t read_chunk_text(std::span<std::uint32_t> out);
};

/// Whole-file convenience wrappers over LabelFileReader.
LabelArray read_labels(const std::filesystem::path& path,
                       LabelFormat format = LabelFormat::Auto);
InstanceArray read_instances(const std::filesystem::path& path,
                             LabelFormat format = LabelFormat::Auto);

/// Write a label or instance file; format must be Text or Binary.
void write_label_file(const std::filesystem::path& path,
                      std::span<const std::uint32_t> values, LabelKind kind,
                      LabelFormat format);

} // namespace segeval
