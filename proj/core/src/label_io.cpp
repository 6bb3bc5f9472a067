#include "segeval/label_io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <limits>

#include "segeval/error.hpp"

namespace segeval {

namespace {

constexpr std::array<char, 4> kLabelMagic = {'S', 'G', 'L', '1'};
constexpr std::array<char, 4> kInstanceMagic = {'S', 'G', 'I', '1'};

const std::array<char, 4>& magic_for(LabelKind kind) {
    return kind == LabelKind::Label ? kLabelMagic : kInstanceMagic;
}

std::uint32_t decode_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

void encode_u32le(std::uint32_t v, char* p) {
    p[0] = static_cast<char>(v & 0xFF);
    p[1] = static_cast<char>((v >> 8) & 0xFF);
    p[2] = static_cast<char>((v >> 16) & 0xFF);
    p[3] = static_cast<char>((v >> 24) & 0xFF);
}

} // namespace

LabelFormat parse_label_format(std::string_view text) {
    if (text == "auto") return LabelFormat::Auto;
    if (text == "text") return LabelFormat::Text;
    if (text == "binary") return LabelFormat::Binary;
    throw ConfigError("unknown label format '" + std::string(text) +
                      "' (expected auto, text or binary)");
}

LabelFileReader::LabelFileReader(const std::filesystem::path& path, LabelFormat format,
                                 LabelKind kind)
    : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open label file '" + path.string() + "'");

    std::array<char, 4> head{};
    in_.read(head.data(), head.size());
    const auto sniffed = static_cast<std::size_t>(in_.gcount());
    const auto& expected = magic_for(kind);
    const bool has_magic = sniffed == 4 && head == expected;

    if (format == LabelFormat::Auto) {
        const auto& other = magic_for(kind == LabelKind::Label ? LabelKind::Instance
                                                               : LabelKind::Label);
        if (sniffed == 4 && head == other)
            throw InputError("'" + path.string() + "': file magic identifies a " +
                             (kind == LabelKind::Label ? "instance" : "label") +
                             " file, not a " +
                             (kind == LabelKind::Label ? "label" : "instance") + " file");
        binary_ = has_magic;
    } else if (format == LabelFormat::Binary) {
        if (!has_magic)
            throw InputError("'" + path.string() + "': bad magic, expected \"" +
                             std::string(expected.begin(), expected.end()) + "\"");
        binary_ = true;
    } else {
        binary_ = false;
    }

    if (binary_) {
        std::array<char, 4> count_bytes{};
        in_.read(count_bytes.data(), count_bytes.size());
        if (in_.gcount() != 4)
            throw InputError("'" + path.string() + "': truncated at byte " +
                             std::to_string(4 + in_.gcount()) + ": incomplete header");
        declared_count_ =
            decode_u32le(reinterpret_cast<const unsigned char*>(count_bytes.data()));
        byte_offset_ = 8;
    } else {
        in_.clear();
        in_.seekg(0);
    }
}

std::size_t LabelFileReader::read_chunk(std::span<std::uint32_t> out) {
    if (finished_ || out.empty()) return 0;
    return binary_ ? read_chunk_binary(out) : read_chunk_text(out);
}

std::size_t LabelFileReader::read_chunk_binary(std::span<std::uint32_t> out) {
    const std::uint64_t remaining = *declared_count_ - values_read_;
    if (remaining == 0) {
        char extra;
        if (in_.read(&extra, 1))
            throw InputError("'" + path_.string() + "': trailing data at byte " +
                             std::to_string(byte_offset_) + " after " +
                             std::to_string(*declared_count_) + " values");
        finished_ = true;
        return 0;
    }

    const std::size_t want =
        static_cast<std::size_t>(std::min<std::uint64_t>(remaining, out.size()));
    std::vector<char> buffer(want * 4);
    in_.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got_bytes = static_cast<std::uint64_t>(in_.gcount());
    const std::size_t whole = static_cast<std::size_t>(got_bytes / 4);
    if (whole < want && got_bytes != buffer.size())
        throw InputError("'" + path_.string() + "': truncated at byte " +
                         std::to_string(byte_offset_ + got_bytes) + ": header count " +
                         std::to_string(*declared_count_) + " but payload holds " +
                         std::to_string(values_read_ + whole) + " values");

    for (std::size_t i = 0; i < whole; ++i)
        out[i] = decode_u32le(reinterpret_cast<const unsigned char*>(buffer.data() + i * 4));
    values_read_ += whole;
    byte_offset_ += whole * 4;
    return whole;
}

std::size_t LabelFileReader::read_chunk_text(std::span<std::uint32_t> out) {
    std::size_t filled = 0;
    std::string line;
    while (filled < out.size() && std::getline(in_, line)) {
        ++line_number_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in_.peek() == std::char_traits<char>::eof()) break;

        std::uint64_t value = 0;
        const char* begin = line.data();
        const char* end = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end ||
            value > std::numeric_limits<std::uint32_t>::max())
            throw InputError("'" + path_.string() + "' line " +
                             std::to_string(line_number_) + ": invalid label '" + line + "'");
        out[filled++] = static_cast<std::uint32_t>(value);
    }
    if (filled == 0) finished_ = true;
    return filled;
}

namespace {

std::vector<std::uint32_t> read_all(const std::filesystem::path& path, LabelFormat format,
                                    LabelKind kind) {
    LabelFileReader reader(path, format, kind);
    std::vector<std::uint32_t> values;
    // Trust the header only up to a point; a corrupt count should fail as
    // a truncation error, not as an allocation blowup.
    if (auto count = reader.declared_count())
        values.reserve(std::min<std::uint64_t>(*count, 1u << 22));
    std::array<std::uint32_t, 65536> chunk;
    while (std::size_t n = reader.read_chunk(chunk)) {
        values.insert(values.end(), chunk.begin(), chunk.begin() + n);
    }
    return values;
}

} // namespace

LabelArray read_labels(const std::filesystem::path& path, LabelFormat format) {
    return read_all(path, format, LabelKind::Label);
}

InstanceArray read_instances(const std::filesystem::path& path, LabelFormat format) {
    return read_all(path, format, LabelKind::Instance);
}

void write_label_file(const std::filesystem::path& path,
                      std::span<const std::uint32_t> values, LabelKind kind,
                      LabelFormat format) {
    if (format == LabelFormat::Auto)
        throw ConfigError("write_label_file requires an explicit format");
    if (values.size() > std::numeric_limits<std::uint32_t>::max())
        throw InputError("cannot write '" + path.string() + "': too many values");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write label file '" + path.string() + "'");

    if (format == LabelFormat::Binary) {
        const auto& magic = magic_for(kind);
        out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
        char count_bytes[4];
        encode_u32le(static_cast<std::uint32_t>(values.size()), count_bytes);
        out.write(count_bytes, 4);
        std::vector<char> buffer(values.size() * 4);
        for (std::size_t i = 0; i < values.size(); ++i)
            encode_u32le(values[i], buffer.data() + i * 4);
        out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    } else {
        std::string text;
        text.reserve(values.size() * 4);
        for (const auto v : values) {
            text += std::to_string(v);
            text += '\n';
        }
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

} // namespace segeval
