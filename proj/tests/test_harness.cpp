#include <doctest.h>

#include <stdexcept>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "resist/config.hpp"
#include "resist/idx.hpp"
#include "resist/suite.hpp"

using namespace resist;

namespace {

const char* kSampleConfig = R"(# sample experiment
suite = sample
seeds = 1,2

[run a]
graph = complete
M = 5
b = 1
attack = dynamic_random
B = 1
strategy = random_value
attack_range = 10
screening = cwtm
J = 3
step = constant
h = 0.1
T_max = 30
objective = quadratic
d = 2
targets = identical
target_value = 0.5,0.5
)";

std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(p);
    return p;
}

void write_be32(std::ofstream& out, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<char*>(buf), 4);
}

void write_idx_fixture(const std::filesystem::path& images, const std::filesystem::path& labels,
                       std::uint32_t image_magic = 0x00000803u, std::uint32_t label_count = 2,
                       bool truncate_pixels = false) {
    std::ofstream img(images, std::ios::binary);
    write_be32(img, image_magic);
    write_be32(img, 2);   // two images
    write_be32(img, 28);
    write_be32(img, 28);
    const std::size_t pixels = truncate_pixels ? 100 : 2 * 28 * 28;
    for (std::size_t i = 0; i < pixels; ++i) img.put(static_cast<char>(i % 256));
    img.close();
    std::ofstream lab(labels, std::ios::binary);
    write_be32(lab, 0x00000801u);
    write_be32(lab, label_count);
    for (std::uint32_t i = 0; i < label_count; ++i) lab.put(static_cast<char>(3 + i));
}

}  // namespace

TEST_CASE("config parse and semantic round trip") {
    RawConfig raw = parse_config(kSampleConfig);
    CHECK(raw.globals.at("suite") == "sample");
    REQUIRE(raw.runs.size() == 1);
    CHECK(raw.runs[0].first == "a");
    CHECK(raw.runs[0].second.at("J") == "3");

    // serialize(parse(text)) parses back to the same key-value content.
    CHECK(parse_config(serialize_config(raw)) == raw);

    // And the typed round trip is idempotent too.
    SuiteSpec suite = validate_config(raw);
    RawConfig again = to_raw(suite);
    SuiteSpec suite2 = validate_config(again);
    CHECK(suite2.runs.size() == suite.runs.size());
    CHECK(suite2.runs[0].j_param == 3);
    CHECK(suite2.seeds == std::vector<std::uint64_t>{1, 2});
}

TEST_CASE("config validation rejects bad keys with pointed messages") {
    auto broken = [](const std::string& patch) {
        std::string text = std::string(kSampleConfig) + patch;
        return validate_config(parse_config(text));
    };
    CHECK_THROWS_AS(broken("J = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(broken("rho = 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(broken("screening = sketchy\n"), std::invalid_argument);
    CHECK_THROWS_AS(broken("T_max = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(broken("h = oops\n"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(broken("step = diminishing\n"), doctest::Contains("diminishing"),
                         std::invalid_argument);
}

TEST_CASE("materialized runs honor the schema") {
    SuiteSpec suite = validate_config(parse_config(kSampleConfig));
    MaterializedRun run = materialize_run(suite.runs[0], 1);
    CHECK(run.config.graph.node_count() == 5);
    CHECK(run.objectives.size() == 5);
    CHECK(run.config.J == 3);
    CHECK(run.config.attack.links_per_round == 1);
}

TEST_CASE("run_suite writes per-seed CSVs plus a summary") {
    SuiteSpec suite = validate_config(parse_config(kSampleConfig));
    auto out = temp_dir("resist_suite_test");
    SuiteResult result = run_suite(suite, out.string());
    CHECK(result.status == kSuiteOk);
    REQUIRE(result.csv_files.size() == 2);
    CHECK(std::filesystem::exists(result.summary_file));

    std::ifstream summary(result.summary_file);
    std::string header, row;
    std::getline(summary, header);
    std::getline(summary, row);
    CHECK(header.rfind("config,n_seeds", 0) == 0);
    CHECK(row.rfind("a,2", 0) == 0);

    // Colliding outputs get a suffix instead of being overwritten.
    SuiteResult second = run_suite(suite, out.string());
    CHECK(second.status == kSuiteOk);
    for (const std::string& f : second.csv_files) CHECK(f.find("_1.csv") != std::string::npos);
    std::filesystem::remove_all(out);
}

TEST_CASE("empty suites succeed with just a summary") {
    SuiteSpec suite;
    suite.name = "empty";
    auto out = temp_dir("resist_empty_suite");
    SuiteResult result = run_suite(suite, out.string());
    CHECK(result.status == kSuiteOk);
    CHECK(result.csv_files.empty());
    CHECK(std::filesystem::exists(result.summary_file));
    std::filesystem::remove_all(out);
}

TEST_CASE("invalid configs are rejected before any run starts") {
    SuiteSpec suite = validate_config(parse_config(kSampleConfig));
    suite.runs[0].b = 2;  // complete graph on 5 nodes violates degree >= 2b+1
    auto out = temp_dir("resist_invalid_suite");
    SuiteResult result = run_suite(suite, out.string());
    CHECK(result.status == kSuiteInvalidConfig);
    CHECK_FALSE(std::filesystem::exists(out / "a_seed1.csv"));
    std::filesystem::remove_all(out);
}

TEST_CASE("idx round trip and error paths") {
    auto dir = temp_dir("resist_idx");
    std::filesystem::create_directories(dir);
    auto images = dir / "images.idx";
    auto labels = dir / "labels.idx";

    SUBCASE("fixture reads back exactly") {
        write_idx_fixture(images, labels);
        Dataset d = load_idx(images.string(), labels.string());
        REQUIRE(d.size() == 2);
        CHECK(d.features[0].size() == 784);
        CHECK(d.labels[0] == 3);
        CHECK(d.labels[1] == 4);
        CHECK(d.features[0][0] == doctest::Approx(0.0));
        CHECK(d.features[0][255] == doctest::Approx(1.0));
    }
    SUBCASE("bad magic") {
        write_idx_fixture(images, labels, 0x00000805u);
        CHECK_THROWS_WITH_AS(load_idx(images.string(), labels.string()),
                             doctest::Contains("bad magic"), std::runtime_error);
    }
    SUBCASE("count mismatch") {
        write_idx_fixture(images, labels, 0x00000803u, 3);
        CHECK_THROWS_WITH_AS(load_idx(images.string(), labels.string()),
                             doctest::Contains("count mismatch"), std::runtime_error);
    }
    SUBCASE("truncated image data") {
        write_idx_fixture(images, labels, 0x00000803u, 2, true);
        CHECK_THROWS_WITH_AS(load_idx(images.string(), labels.string()),
                             doctest::Contains("truncated"), std::runtime_error);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("suite runs are deterministic across parallelism settings") {
    SuiteSpec suite = validate_config(parse_config(kSampleConfig));
    auto out1 = temp_dir("resist_par1");
    auto out2 = temp_dir("resist_par2");
    SuiteResult serial = run_suite(suite, out1.string(), {}, 1);
    SuiteResult parallel = run_suite(suite, out2.string(), {}, 4);
    REQUIRE(serial.csv_files.size() == parallel.csv_files.size());
    for (std::size_t i = 0; i < serial.csv_files.size(); ++i) {
        std::ifstream a(serial.csv_files[i], std::ios::binary), b(parallel.csv_files[i], std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
    }
    std::filesystem::remove_all(out1);
    std::filesystem::remove_all(out2);
}
