#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "random_dataset.hpp"
#include "segeval/build.hpp"
#include "segeval/error.hpp"
#include "segeval/label_io.hpp"
#include "segeval/manifest.hpp"
#include "toy_dataset.hpp"

using namespace segeval;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("segeval_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

void write_bytes(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string le32(std::uint32_t v) {
    std::string s(4, '\0');
    s[0] = static_cast<char>(v & 0xFF);
    s[1] = static_cast<char>((v >> 8) & 0xFF);
    s[2] = static_cast<char>((v >> 16) & 0xFF);
    s[3] = static_cast<char>((v >> 24) & 0xFF);
    return s;
}

// Serializes the toy fixture; `binary` switches the label encoding.
fs::path write_toy_dataset(const TempDir& dir, bool binary, bool with_instances = true) {
    const auto toy = testfix::make_toy();
    const LabelFormat format = binary ? LabelFormat::Binary : LabelFormat::Text;
    std::string clouds_json;
    for (const auto& cloud : toy.clouds) {
        write_label_file(dir.path / (cloud.id + ".gt"), cloud.gt, LabelKind::Label, format);
        write_label_file(dir.path / (cloud.id + ".pred"), cloud.pred, LabelKind::Label,
                         format);
        std::string inst_entry;
        if (with_instances) {
            write_label_file(dir.path / (cloud.id + ".inst"), cloud.inst,
                             LabelKind::Instance, format);
            inst_entry = ", \"instance_path\": \"" + cloud.id + ".inst\"";
        }
        if (!clouds_json.empty()) clouds_json += ",\n";
        clouds_json += "    {\"cloud_id\": \"" + cloud.id + "\", \"gt_path\": \"" +
                       cloud.id + ".gt\", \"pred_path\": \"" + cloud.id + ".pred\"" +
                       inst_entry + "}";
    }
    const fs::path manifest = dir.path / "toy.segm.json";
    write_text_file(manifest, "{\n  \"num_categories\": 2,\n  \"ignore_id\": 4294967295,\n"
                              "  \"category_names\": [\"A\", \"B\"],\n  \"clouds\": [\n" +
                                  clouds_json + "\n  ]\n}\n");
    return manifest;
}

} // namespace

TEST_CASE("load_manifest accepts a minimal document") {
    TempDir dir;
    write_text_file(dir.path / "m.segm.json",
                    R"({"num_categories": 2, "ignore_id": 99,
                        "clouds": [{"cloud_id": "a", "gt_path": "a.gt", "pred_path": "a.pred"}]})");
    const auto manifest = load_manifest(dir.path / "m.segm.json");
    CHECK(manifest.num_categories == 2);
    CHECK(manifest.ignore_id == 99);
    REQUIRE(manifest.clouds.size() == 1);
    CHECK(manifest.clouds[0].gt_path == dir.path / "a.gt");
    CHECK(!manifest.clouds[0].instance_path.has_value());
    CHECK(!manifest.category_names.has_value());
}

TEST_CASE("load_manifest rejects duplicates and bad schemas") {
    TempDir dir;
    SUBCASE("duplicate cloud id") {
        write_text_file(dir.path / "dup.segm.json",
                        R"({"num_categories": 1, "ignore_id": 5, "clouds": [
                            {"cloud_id": "room_a", "gt_path": "x", "pred_path": "y"},
                            {"cloud_id": "room_a", "gt_path": "x", "pred_path": "y"}]})");
        try {
            load_manifest(dir.path / "dup.segm.json");
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("room_a") != std::string::npos);
        }
    }
    SUBCASE("category_names of the wrong length") {
        write_text_file(dir.path / "names.segm.json",
                        R"({"num_categories": 3, "ignore_id": 5,
                            "category_names": ["a", "b"], "clouds": []})");
        CHECK_THROWS_AS(load_manifest(dir.path / "names.segm.json"), InputError);
    }
    SUBCASE("missing field") {
        write_text_file(dir.path / "missing.segm.json", R"({"ignore_id": 5, "clouds": []})");
        try {
            load_manifest(dir.path / "missing.segm.json");
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("num_categories") != std::string::npos);
        }
    }
    SUBCASE("unreadable file") {
        CHECK_THROWS_AS(load_manifest(dir.path / "nope.segm.json"), IoError);
    }
    SUBCASE("malformed json") {
        write_text_file(dir.path / "broken.segm.json", "{not json");
        CHECK_THROWS_AS(load_manifest(dir.path / "broken.segm.json"), InputError);
    }
}

TEST_CASE("read_labels parses text") {
    TempDir dir;
    write_text_file(dir.path / "t.txt", "0\n0\n1\n");
    CHECK(read_labels(dir.path / "t.txt") == LabelArray{0, 0, 1});

    // Trailing newline is optional.
    write_text_file(dir.path / "t2.txt", "0\n0\n1");
    CHECK(read_labels(dir.path / "t2.txt") == LabelArray{0, 0, 1});

    write_text_file(dir.path / "bad.txt", "0\nabc\n1\n");
    try {
        read_labels(dir.path / "bad.txt");
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("binary labels round-trip and sniff") {
    TempDir dir;
    const LabelArray values = {0, 0, 1};
    write_label_file(dir.path / "b.sgl", values, LabelKind::Label, LabelFormat::Binary);
    CHECK(read_labels(dir.path / "b.sgl") == values);
    CHECK(read_labels(dir.path / "b.sgl", LabelFormat::Binary) == values);

    // The instance magic is not a label magic.
    write_label_file(dir.path / "i.sgi", values, LabelKind::Instance, LabelFormat::Binary);
    CHECK(read_instances(dir.path / "i.sgi") == values);
    CHECK_THROWS_AS(read_labels(dir.path / "i.sgi"), InputError);
    CHECK_THROWS_AS(read_labels(dir.path / "i.sgi", LabelFormat::Binary), InputError);
}

TEST_CASE("truncated binary payload reports the byte offset") {
    TempDir dir;
    // Header declares 4 values, payload carries 3: ends at byte 8 + 3*4 = 20.
    write_bytes(dir.path / "trunc.sgl",
                "SGL1" + le32(4) + le32(0) + le32(0) + le32(1));
    try {
        read_labels(dir.path / "trunc.sgl");
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("byte 20") != std::string::npos);
    }
}

TEST_CASE("short and garbled binary headers are rejected") {
    TempDir dir;
    write_bytes(dir.path / "half_header.sgl", "SGL1" + std::string("\x02\x00", 2));
    try {
        read_labels(dir.path / "half_header.sgl");
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("byte 6") != std::string::npos);
    }

    // Unknown magic falls back to text under auto detection and fails as
    // such, with a line position.
    write_bytes(dir.path / "garbage.sgl", "QQQ9" + le32(1) + le32(0));
    try {
        read_labels(dir.path / "garbage.sgl");
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
    // Explicit binary insists on the magic.
    CHECK_THROWS_AS(read_labels(dir.path / "garbage.sgl", LabelFormat::Binary), InputError);
}

TEST_CASE("trailing binary payload is rejected") {
    TempDir dir;
    write_bytes(dir.path / "extra.sgl", "SGL1" + le32(1) + le32(0) + le32(9));
    CHECK_THROWS_AS(read_labels(dir.path / "extra.sgl"), InputError);
}

TEST_CASE("text and binary encodings agree on random arrays") {
    TempDir dir;
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        LabelArray values;
        const auto n = rng() % 500;
        for (std::uint64_t i = 0; i < n; ++i)
            values.push_back(static_cast<std::uint32_t>(rng()));
        write_label_file(dir.path / "x.txt", values, LabelKind::Label, LabelFormat::Text);
        write_label_file(dir.path / "x.sgl", values, LabelKind::Label, LabelFormat::Binary);
        CHECK(read_labels(dir.path / "x.txt") == values);
        CHECK(read_labels(dir.path / "x.sgl") == values);
    }
}

TEST_CASE("build_stats reproduces the toy cells from files") {
    TempDir dir;
    for (const bool binary : {false, true}) {
        const auto manifest_path = write_toy_dataset(dir, binary);
        const auto manifest = load_manifest(manifest_path);
        MetricConfig config;
        config.ignore_id = manifest.ignore_id;
        const auto stats = build_stats(manifest, config);
        const auto toy = testfix::make_toy();
        CHECK(stats == toy.stats);
    }
}

TEST_CASE("build_stats is independent of cloud order and thread count") {
    TempDir dir;
    const auto manifest_path = write_toy_dataset(dir, true);
    auto manifest = load_manifest(manifest_path);
    MetricConfig config;
    config.ignore_id = manifest.ignore_id;
    const auto forward = build_stats(manifest, config);

    std::reverse(manifest.clouds.begin(), manifest.clouds.end());
    const auto reversed = build_stats(manifest, config);
    CHECK(forward == reversed);

    BuildOptions options;
    options.threads = 4;
    CHECK(build_stats(manifest, config, options) == forward);
    options.chunk_size = 3; // force several chunks per cloud
    CHECK(build_stats(manifest, config, options) == forward);
}

TEST_CASE("build_stats names the cloud on a length mismatch") {
    TempDir dir;
    write_label_file(dir.path / "a.gt", LabelArray{0, 0, 1}, LabelKind::Label,
                     LabelFormat::Text);
    write_label_file(dir.path / "a.pred", LabelArray{0, 0}, LabelKind::Label,
                     LabelFormat::Text);
    write_text_file(dir.path / "m.segm.json",
                    R"({"num_categories": 2, "ignore_id": 4294967295, "clouds": [
                        {"cloud_id": "broken_room", "gt_path": "a.gt", "pred_path": "a.pred"}]})");
    try {
        build_stats(load_manifest(dir.path / "m.segm.json"), {});
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("broken_room") != std::string::npos);
    }
}

TEST_CASE("file errors under a cloud carry its id") {
    TempDir dir;
    write_text_file(dir.path / "m.segm.json",
                    R"({"num_categories": 1, "ignore_id": 9, "clouds": [
                        {"cloud_id": "lost_room", "gt_path": "missing.gt",
                         "pred_path": "missing.pred"}]})");
    try {
        build_stats(load_manifest(dir.path / "m.segm.json"), {});
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("lost_room") != std::string::npos);
    }

    write_label_file(dir.path / "bad.gt", LabelArray{0}, LabelKind::Label,
                     LabelFormat::Text);
    write_text_file(dir.path / "bad.pred", "zardoz\n");
    write_text_file(dir.path / "m2.segm.json",
                    R"({"num_categories": 1, "ignore_id": 9, "clouds": [
                        {"cloud_id": "garbled_room", "gt_path": "bad.gt",
                         "pred_path": "bad.pred"}]})");
    try {
        build_stats(load_manifest(dir.path / "m2.segm.json"), {});
        FAIL("expected InputError");
    } catch (const InputError& e) {
        const std::string what = e.what();
        CHECK(what.find("garbled_room") != std::string::npos);
        CHECK(what.find("line 1") != std::string::npos);
    }
}

TEST_CASE("manifest without instance paths leaves instance lists empty") {
    TempDir dir;
    const auto manifest_path = write_toy_dataset(dir, true, false);
    MetricConfig config;
    const auto stats = build_stats(load_manifest(manifest_path), config);
    for (const auto& cloud : stats.clouds) {
        CHECK(!cloud.has_instance_data);
        for (const auto& list : cloud.instances) CHECK(list.empty());
    }
}

TEST_CASE("clouds with zero valid points are skipped with a note") {
    TempDir dir;
    MetricConfig config;
    config.ignore_id = 9;
    write_label_file(dir.path / "e.gt", LabelArray{9, 9}, LabelKind::Label,
                     LabelFormat::Text);
    write_label_file(dir.path / "e.pred", LabelArray{0, 0}, LabelKind::Label,
                     LabelFormat::Text);
    write_label_file(dir.path / "f.gt", LabelArray{0}, LabelKind::Label, LabelFormat::Text);
    write_label_file(dir.path / "f.pred", LabelArray{0}, LabelKind::Label,
                     LabelFormat::Text);
    write_text_file(dir.path / "m.segm.json",
                    R"({"num_categories": 1, "ignore_id": 9, "clouds": [
                        {"cloud_id": "empty", "gt_path": "e.gt", "pred_path": "e.pred"},
                        {"cloud_id": "full", "gt_path": "f.gt", "pred_path": "f.pred"}]})");
    const auto stats = build_stats(load_manifest(dir.path / "m.segm.json"), config);
    REQUIRE(stats.clouds.size() == 1);
    CHECK(stats.clouds[0].cloud_id == "full");
    CHECK(stats.skipped_clouds == std::vector<std::string>{"empty"});
}
