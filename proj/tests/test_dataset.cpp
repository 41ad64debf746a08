// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "iriszoo/dataset.hpp"
#include "iriszoo/errors.hpp"

using namespace iriszoo;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "iriszoo_dataset_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Mean and standard deviation of genuine-pair similarities, walking pairs
// directly instead of going through the matcher.
struct PairStats {
    double mean = 0.0;
    double sd = 0.0;
    size_t count = 0;
};

template <typename Filter>
PairStats pair_stats(const Dataset& ds, Filter&& keep) {
    double sum = 0.0;
    double sum_sq = 0.0;
    size_t count = 0;
    for (size_t a = 0; a < ds.records.size(); ++a) {
        for (size_t b = a + 1; b < ds.records.size(); ++b) {
            if (!keep(ds.records[a], ds.records[b])) {
                continue;
            }
            const double s = hamming_similarity(ds.records[a].code, ds.records[b].code);
            sum += s;
            sum_sq += s * s;
            ++count;
        }
    }
    PairStats stats;
    stats.count = count;
    stats.mean = sum / static_cast<double>(count);
    stats.sd = std::sqrt(sum_sq / static_cast<double>(count) - stats.mean * stats.mean);
    return stats;
}

bool genuine(const TemplateRecord& a, const TemplateRecord& b) {
    return a.class_id == b.class_id;
}

bool imposter(const TemplateRecord& a, const TemplateRecord& b) {
    return a.class_id != b.class_id;
}

} // namespace

TEST_CASE("generation is a pure function of the spec") {
    CalibrationSpec spec;
    spec.rows = 4;
    spec.cols = 64;
    spec.n_classes = 6;
    spec.samples_per_class = 3;
    spec.genuine_flip_rate = 0.15;
    spec.correlation_block = 8;
    spec.seed = 42;

    const Dataset a = generate_dataset(spec);
    const Dataset b = generate_dataset(spec);
    CHECK(a == b);

    spec.seed = 43;
    const Dataset c = generate_dataset(spec);
    CHECK_FALSE(a == c);

    CHECK(a.n_templates() == 18);
    for (const TemplateRecord& rec : a.records) {
        CHECK(rec.template_id == static_cast<int>(&rec - a.records.data()));
        CHECK(rec.user_id == rec.class_id / 2);
    }
}

TEST_CASE("zero noise means identical genuine templates") {
    CalibrationSpec spec;
    spec.rows = 4;
    spec.cols = 64;
    spec.n_classes = 8;
    spec.samples_per_class = 4;
    spec.genuine_flip_rate = 0.0;
    spec.seed = 3;

    const Dataset ds = generate_dataset(spec);
    for (size_t a = 0; a < ds.records.size(); ++a) {
        for (size_t b = a + 1; b < ds.records.size(); ++b) {
            if (genuine(ds.records[a], ds.records[b])) {
                CHECK(hamming_similarity(ds.records[a].code, ds.records[b].code) == 1.0);
            }
        }
    }
}

TEST_CASE("genuine similarity concentrates at 1 - 2p(1-p)") {
    // Two samples of one prototype differ per bit when exactly one of the
    // two flips fired, so the expected similarity is 1 - 2p(1-p). Checked
    // by Monte Carlo over >= 10^4 genuine pairs.
    CalibrationSpec spec;
    spec.rows = 16;
    spec.cols = 128;  // 2048 bits
    spec.n_classes = 400;
    spec.samples_per_class = 8;
    spec.genuine_flip_rate = 0.1;
    spec.correlation_block = 1;
    spec.seed = 17;

    const Dataset ds = generate_dataset(spec);
    const PairStats stats = pair_stats(ds, genuine);
    CHECK(stats.count == 400u * 28u);
    const double expected = 1.0 - 2.0 * 0.1 * 0.9;
    CHECK(expected == doctest::Approx(0.82));
    CHECK(std::abs(stats.mean - expected) < 0.02);
}

TEST_CASE("imposter similarity sits at one half for any block size") {
    for (int block : {1, 16}) {
        CalibrationSpec spec;
        spec.rows = 16;
        spec.cols = 128;
        spec.n_classes = 60;
        spec.samples_per_class = 2;
        spec.genuine_flip_rate = 0.1;
        spec.correlation_block = block;
        spec.seed = 23;
        const Dataset ds = generate_dataset(spec);
        const PairStats stats = pair_stats(ds, imposter);
        CHECK(stats.count > 6000u);
        CHECK(std::abs(stats.mean - 0.5) < 0.01);
    }
}

TEST_CASE("block correlation widens the imposter distribution by sqrt(L)") {
    // Per-bit noise dilutes the block structure: a block's bits differ
    // with correlation (1-2q)^2 for q = 2p(1-p), so the variance gain over
    // independent bits is 1 + (L-1)(1-2q)^2 and the sqrt(L) ratio needs a
    // small p. At p = 0.01 the predicted ratio is 3.85.
    auto imposter_sd = [](int block) {
        CalibrationSpec spec;
        spec.rows = 16;
        spec.cols = 128;
        spec.n_classes = 100;
        spec.samples_per_class = 2;
        spec.genuine_flip_rate = 0.01;
        spec.correlation_block = block;
        spec.seed = 29;
        return pair_stats(generate_dataset(spec), imposter).sd;
    };
    const double ratio = imposter_sd(16) / imposter_sd(1);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("spec validation") {
    CalibrationSpec good;
    good.rows = 4;
    good.cols = 64;
    good.n_classes = 4;
    good.samples_per_class = 2;
    CHECK_NOTHROW(generate_dataset(good));

    auto expect_rejected = [&](auto&& tweak) {
        CalibrationSpec spec = good;
        tweak(spec);
        CHECK_THROWS_AS(generate_dataset(spec), PreconditionError);
    };
    expect_rejected([](CalibrationSpec& s) { s.rows = 1; s.cols = 3; });
    expect_rejected([](CalibrationSpec& s) { s.genuine_flip_rate = 0.6; });
    expect_rejected([](CalibrationSpec& s) { s.genuine_flip_rate = 0.5; });
    expect_rejected([](CalibrationSpec& s) { s.genuine_flip_rate = -0.1; });
    expect_rejected([](CalibrationSpec& s) { s.correlation_block = 3; });
    expect_rejected([](CalibrationSpec& s) { s.correlation_block = 0; });
    expect_rejected([](CalibrationSpec& s) { s.n_classes = 1; });
    expect_rejected([](CalibrationSpec& s) { s.samples_per_class = 1; });
    expect_rejected([](CalibrationSpec& s) {
        s.anomalies = {{AnomalyKind::goat_class, {9}, 2.0}};
    });
    expect_rejected([](CalibrationSpec& s) {
        s.anomalies = {{AnomalyKind::wolf_lamb_pair, {1, 1}, 0.5}};
    });
    expect_rejected([](CalibrationSpec& s) {
        s.anomalies = {{AnomalyKind::wolf_lamb_pair, {0, 1}, 1.5}};
    });
    expect_rejected([](CalibrationSpec& s) {
        s.genuine_flip_rate = 0.2;
        s.anomalies = {{AnomalyKind::goat_class, {0}, 3.0}};  // 0.6 effective
    });
}

TEST_CASE("goat anomaly degrades only the target class") {
    CalibrationSpec spec;
    spec.rows = 16;
    spec.cols = 128;
    spec.n_classes = 10;
    spec.samples_per_class = 4;
    spec.genuine_flip_rate = 0.12;
    spec.correlation_block = 16;
    spec.seed = 31;
    spec.anomalies = {{AnomalyKind::goat_class, {0}, 3.0}};

    const Dataset ds = generate_dataset(spec);
    const PairStats goat = pair_stats(ds, [](const auto& a, const auto& b) {
        return a.class_id == 0 && b.class_id == 0;
    });
    const PairStats rest = pair_stats(ds, [](const auto& a, const auto& b) {
        return a.class_id == b.class_id && a.class_id != 0;
    });
    // Effective rates 0.36 vs 0.12: means near 0.54 and 0.79.
    CHECK(goat.mean < 0.60);
    CHECK(rest.mean > 0.75);
}

TEST_CASE("wolf pair anomaly entangles the two target prototypes") {
    CalibrationSpec spec;
    spec.rows = 16;
    spec.cols = 128;
    spec.n_classes = 10;
    spec.samples_per_class = 4;
    spec.genuine_flip_rate = 0.12;
    spec.correlation_block = 16;
    spec.seed = 37;
    spec.anomalies = {{AnomalyKind::wolf_lamb_pair, {1, 2}, 0.9}};

    const Dataset ds = generate_dataset(spec);
    const PairStats cross = pair_stats(ds, [](const auto& a, const auto& b) {
        return (a.class_id == 1 && b.class_id == 2) || (a.class_id == 2 && b.class_id == 1);
    });
    const PairStats other = pair_stats(ds, [](const auto& a, const auto& b) {
        return a.class_id != b.class_id && a.class_id > 2 && b.class_id > 2;
    });
    CHECK(cross.mean > 0.70);
    CHECK(std::abs(other.mean - 0.5) < 0.02);
}

TEST_CASE("save and load round trip") {
    CalibrationSpec spec;
    spec.rows = 8;
    spec.cols = 128;
    spec.n_classes = 5;
    spec.samples_per_class = 3;
    spec.genuine_flip_rate = 0.13;
    spec.correlation_block = 4;
    spec.seed = 0xdeadbeefcafe;
    spec.anomalies = {{AnomalyKind::goat_class, {2}, 3.5},
                      {AnomalyKind::wolf_lamb_pair, {0, 4}, 0.75}};

    const Dataset ds = generate_dataset(spec);
    const fs::path path = temp_file("roundtrip.json");
    save_dataset(ds, path);

    const Dataset loaded = load_dataset(path);
    CHECK(loaded == ds);

    // Saving the loaded dataset reproduces the file exactly.
    const fs::path again = temp_file("roundtrip2.json");
    save_dataset(loaded, again);
    CHECK(slurp(path) == slurp(again));
}

TEST_CASE("hand-written dataset file loads") {
    const char* text = R"({
      "version": 1, "rows": 1, "cols": 64,
      "spec": {"rows": 1, "cols": 64, "n_classes": 2, "samples_per_class": 2,
               "p": 0.0, "L": 1, "seed": 7, "anomalies": []},
      "classes": [
        {"class_id": 0, "user_id": 0,
         "templates": ["0000000000000000", "ffffffffffffffff"]},
        {"class_id": 1, "user_id": 1,
         "templates": ["00000000ffffffff", "f0f0f0f0f0f0f0f0"]}
      ]
    })";
    const fs::path path = temp_file("hand.json");
    std::ofstream(path) << text;

    const Dataset ds = load_dataset(path);
    CHECK(ds.n_templates() == 4);
    CHECK(ds.records[0].template_id == 0);
    CHECK(ds.records[3].template_id == 3);
    CHECK(ds.records[2].class_id == 1);
    CHECK(ds.records[2].user_id == 1);
    CHECK(hamming_distance(ds.records[0].code, ds.records[1].code) == 64);
    CHECK(hamming_distance(ds.records[0].code, ds.records[2].code) == 32);
}

TEST_CASE("malformed dataset files are rejected") {
    auto write = [](const char* name, const std::string& text) {
        const fs::path path = temp_file(name);
        std::ofstream(path) << text;
        return path;
    };

    CHECK_THROWS_AS(load_dataset(temp_file("does_not_exist.json")), IoError);
    CHECK_THROWS_AS(load_dataset(write("garbage.json", "not json")), FormatError);

    const std::string shell = R"({
      "version": 1, "rows": 1, "cols": 16,
      "spec": {"rows": 1, "cols": 16, "n_classes": 2, "samples_per_class": 1,
               "p": 0.0, "L": 1, "seed": 7, "anomalies": []},
      "classes": [
        {"class_id": 0, "user_id": 0, "templates": ["%0"]},
        {"class_id": %1, "user_id": 1, "templates": ["%2"]}
      ]
    })";
    auto fill = [&](const std::string& t0, const std::string& cid, const std::string& t1) {
        std::string out = shell;
        out.replace(out.find("%0"), 2, t0);
        out.replace(out.find("%1"), 2, cid);
        out.replace(out.find("%2"), 2, t1);
        return out;
    };

    // Payload shorter than rows*cols/4.
    CHECK_THROWS_AS(load_dataset(write("shorthex.json", fill("ab", "1", "abcd"))),
                    FormatError);
    // Duplicate class id.
    CHECK_THROWS_AS(load_dataset(write("dupclass.json", fill("abcd", "0", "abcd"))),
                    FormatError);
    // Non-hex payload.
    CHECK_THROWS_AS(load_dataset(write("badhex.json", fill("abcd", "1", "wxyz"))),
                    FormatError);
}
