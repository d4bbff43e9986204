#include <doctest.h>

#include <fstream>
#include <sstream>

#include "planeguard/bitplane.hpp"
#include "planeguard/dataset.hpp"
#include "planeguard/error.hpp"
#include "planeguard/experiment.hpp"
#include "planeguard/features.hpp"
#include "test_support.hpp"

using namespace planeguard;
using planeguard::testing::TempDir;

namespace {

ExperimentConfig config(std::size_t workers = 1) {
    ExperimentConfig c;
    c.key[0] = 0x42;
    c.seed = 5;
    c.workers = workers;
    return c;
}

ReportRow row(int s, Task task, double acc) {
    ReportRow r;
    r.s = s;
    r.task = task;
    r.accuracy = acc;
    r.n_train = 1600;
    r.n_test = 400;
    r.seed = 1;
    return r;
}

std::vector<ReportRow> parse_report(const std::string& text) {
    std::istringstream is(text);
    return read_report(is);
}

std::string tradeoff_csv(const std::vector<ReportRow>& f, const std::vector<ReportRow>& r) {
    std::ostringstream os;
    write_tradeoff(os, tradeoff_report(f, r));
    return os.str();
}

}  // namespace

TEST_CASE("privacy index") {
    CHECK(privacy_index(0.76) == doctest::Approx(0.24).epsilon(1e-15));
    CHECK(format_double(privacy_index(0.76)) == "0.24");
    CHECK(format_double(privacy_index(0.29)) == "0.71");
    CHECK(privacy_index(1.0) == 0.0);
    CHECK(privacy_index(0.0) == 1.0);
    CHECK_THROWS_AS(privacy_index(1.01), InvalidInput);
    CHECK_THROWS_AS(privacy_index(-0.1), InvalidInput);
    CHECK_THROWS_AS(privacy_index(std::nan("")), InvalidInput);
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform();
        const double p = privacy_index(x);
        REQUIRE((p >= 0.0 && p <= 1.0));
        REQUIRE(std::abs(privacy_index(p) - x) <= 1e-15);
    }
    // Exact on values representable with few bits.
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) CHECK(privacy_index(privacy_index(x)) == x);
}

TEST_CASE("report rows round trip") {
    std::ostringstream os;
    write_report_header(os);
    write_report_row(os, row(3, Task::ForensicsZeroed, 0.8875));
    write_report_row(os, row(4, Task::ForensicsRaw, 0.6625));
    const auto text = os.str();
    CHECK(text == "s,task,accuracy,n_train,n_test,seed\n3,forensics_zeroed,0.8875,1600,400,1\n"
                  "4,forensics_raw,0.6625,1600,400,1\n");
    const auto back = parse_report(text);
    REQUIRE(back.size() == 2);
    CHECK(back[1].task == Task::ForensicsRaw);
    CHECK(back[1].accuracy == 0.6625);
    CHECK_FALSE(back[0].privacy_index.has_value());

    std::ostringstream with;
    write_report_header(with, true);
    auto rec = row(5, Task::Recognizability, 0.29);
    rec.privacy_index = privacy_index(0.29);
    write_report_row(with, rec, true);
    write_report_row(with, row(6, Task::Recognizability, 0.2), true);
    CHECK(with.str() == "s,task,accuracy,n_train,n_test,seed,privacy_index\n5,recognizability,0.29,1600,400,1,0.71\n"
                        "6,recognizability,0.2,1600,400,1,\n");
    const auto rows = parse_report(with.str());
    CHECK(rows[0].privacy_index.value() == 1.0 - 0.29);
    CHECK_FALSE(rows[1].privacy_index.has_value());
    CHECK_THROWS_AS(parse_report("s,task,accuracy,n_train,n_test,seed,privacy_index\n5,recognizability,0.29,1,1,1,0.5\n"),
                    ParseError);
}

TEST_CASE("report parse errors name the line") {
    auto line_of = [](const std::string& text) {
        try {
            parse_report(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("") == 1);
    CHECK(line_of("s,acc\n") == 1);
    CHECK(line_of("s,task,accuracy,n_train,n_test,seed\n1,forensics_raw,0.5,1,1,1\n2,forensics_raw,x,1,1,1\n") == 3);
    CHECK(line_of("s,task,accuracy,n_train,n_test,seed\n9,forensics_raw,0.5,1,1,1\n") == 2);
    CHECK(line_of("s,task,accuracy,n_train,n_test,seed\n1,forensics_raw,1.5,1,1,1\n") == 2);
    CHECK(line_of("s,task,accuracy,n_train,n_test,seed\n1,unknown,0.5,1,1,1\n") == 2);
    CHECK(line_of("s,task,accuracy,n_train,n_test,seed\n1,forensics_raw,0.5,1,1\n") == 2);
}

TEST_CASE("append creates the header once") {
    TempDir dir("report");
    const auto path = dir / "r.csv";
    append_report_row(path, row(0, Task::ForensicsZeroed, 0.9));
    append_report_row(path, row(1, Task::ForensicsZeroed, 0.85));
    std::ifstream is(path);
    const auto rows = read_report(is);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].s == 1);

    const auto rec_path = dir / "recog.csv";
    auto rec = row(5, Task::Recognizability, 0.29);
    rec.privacy_index = privacy_index(0.29);
    append_report_row(rec_path, rec);
    append_report_row(rec_path, row(6, Task::Recognizability, 0.25));
    std::ifstream rs(rec_path);
    const auto recs = read_report(rs);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].privacy_index.has_value());
}

TEST_CASE("trade-off assembly") {
    const std::vector<ReportRow> forensics = {row(5, Task::ForensicsZeroed, 0.81)};
    const std::vector<ReportRow> recog = {row(5, Task::Recognizability, 0.29)};
    const auto rows = tradeoff_report(forensics, recog);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].forensics_accuracy == 0.81);
    CHECK(rows[0].privacy_index.value() == 1.0 - 0.29);
    CHECK(tradeoff_csv(forensics, recog) ==
          "s,forensics_accuracy,recognizability_accuracy,privacy_index\n5,0.81,0.29,0.71\n");
    CHECK(tradeoff_csv(forensics, {}) == "s,forensics_accuracy,recognizability_accuracy,privacy_index\n5,0.81,,\n");
}

TEST_CASE("trade-off over the full s grid") {
    std::vector<ReportRow> f, r;
    for (int s = 0; s <= 8; ++s) {
        f.push_back(row(s, Task::ForensicsRaw, 0.5));
        f.push_back(row(s, Task::ForensicsZeroed, 0.9 - 0.05 * s));
        r.push_back(row(s, Task::Recognizability, 0.76 - 0.08 * s));
    }
    const auto rows = tradeoff_report(f, r);
    REQUIRE(rows.size() == 9);
    for (int s = 0; s <= 8; ++s) {
        CHECK(rows[static_cast<std::size_t>(s)].s == s);
        CHECK(rows[static_cast<std::size_t>(s)].forensics_accuracy == 0.9 - 0.05 * s);  // zeroed preferred
        CHECK(rows[static_cast<std::size_t>(s)].privacy_index.value() == 1.0 - (0.76 - 0.08 * s));
    }
    // Raw rows are used when no zeroed row exists.
    CHECK(tradeoff_report({row(2, Task::ForensicsRaw, 0.6)}, {})[0].forensics_accuracy == 0.6);
}

TEST_CASE("trade-off input validation") {
    CHECK_THROWS_AS(tradeoff_report({row(1, Task::ForensicsZeroed, 0.8), row(1, Task::ForensicsZeroed, 0.7)}, {}),
                    InvalidInput);
    CHECK_THROWS_AS(tradeoff_report({row(1, Task::Recognizability, 0.8)}, {}), InvalidInput);
    CHECK_THROWS_AS(tradeoff_report({row(1, Task::ForensicsZeroed, 0.8)}, {row(1, Task::ForensicsRaw, 0.8)}),
                    InvalidInput);
    CHECK_THROWS_AS(tradeoff_report({row(1, Task::ForensicsZeroed, 0.8)}, {row(2, Task::Recognizability, 0.5)}),
                    InvalidInput);
}

TEST_CASE("task names") {
    for (Task t : {Task::ForensicsRaw, Task::ForensicsZeroed, Task::Recognizability}) CHECK(parse_task(name(t)) == t);
    CHECK(name(Task::Recognizability) == "recognizability");
    CHECK(name(Preprocess::ZeroPlanes) == "zero");
    CHECK_THROWS_AS(parse_task("other"), InvalidInput);
}

TEST_CASE("small experiment on synthetic data") {
    auto data = synthesize_dataset(2, 10, 64);
    const ForensicsExperiment exp(data.manifest, data.images, config());
    CHECK(exp.split_indices().train.size() == 16);
    CHECK(exp.split_indices().test.size() == 4);

    // s = 0: both preprocessing modes see the same pixels.
    CHECK(exp.features(0, Preprocess::None).features == exp.features(0, Preprocess::ZeroPlanes).features);
    const auto raw0 = exp.run(0, Preprocess::None);
    const auto zero0 = exp.run(0, Preprocess::ZeroPlanes);
    CHECK(raw0.accuracy == zero0.accuracy);
    CHECK(raw0.task == Task::ForensicsRaw);
    CHECK(zero0.n_train == 16);
    CHECK(zero0.n_test == 4);
    CHECK(zero0.seed == 5);

    // s = 8 with zeroing leaves nothing: constant features, chance accuracy.
    const auto f8 = exp.features(8, Preprocess::ZeroPlanes);
    for (Eigen::Index i = 1; i < f8.features.rows(); ++i) REQUIRE(f8.features.row(i) == f8.features.row(0));
    CHECK(exp.run(8, Preprocess::ZeroPlanes).accuracy == 0.5);

    // Encryption without zeroing changes the features of every image.
    const auto enc = exp.features(3, Preprocess::None);
    const auto clear = exp.features(0, Preprocess::None);
    for (Eigen::Index i = 0; i < enc.features.rows(); ++i) CHECK(enc.features.row(i) != clear.features.row(i));

    // Zeroed features equal extraction from the clear image.
    const auto z3 = exp.features(3, Preprocess::ZeroPlanes);
    const auto direct = extract_features(data.images[4], 3);
    CHECK(std::equal(direct.values.begin(), direct.values.end(), z3.features.row(4).begin()));
}

TEST_CASE("results do not depend on the worker count") {
    auto data = synthesize_dataset(3, 10, 64);
    const ForensicsExperiment one(data.manifest, data.images, config(1));
    const ForensicsExperiment many(data.manifest, data.images, config(4));
    CHECK(one.features(2, Preprocess::None).features == many.features(2, Preprocess::None).features);
    const auto a = one.run(4, Preprocess::ZeroPlanes);
    const auto b = many.run(4, Preprocess::ZeroPlanes);
    CHECK(a.accuracy == b.accuracy);
    CHECK(one.run(4, Preprocess::ZeroPlanes).accuracy == a.accuracy);
}

TEST_CASE("experiment from a manifest on disk") {
    TempDir dir("exp");
    const auto data = synthesize_dataset(4, 10, 64);
    const auto manifest = write_synthetic_dataset(data, dir.path());
    std::vector<std::string> stages;
    auto cfg = config();
    cfg.progress = [&](std::string_view stage, std::size_t, std::size_t) { stages.emplace_back(stage); };
    const auto from_disk = run_forensics_experiment(manifest, 2, Preprocess::ZeroPlanes, cfg);
    const auto in_memory = ForensicsExperiment(data.manifest, data.images, config()).run(2, Preprocess::ZeroPlanes);
    CHECK(from_disk.accuracy == in_memory.accuracy);
    CHECK(std::count(stages.begin(), stages.end(), "load") == 20);
    CHECK(std::count(stages.begin(), stages.end(), "extract") == 20);
    CHECK_THROWS_AS(run_forensics_experiment(manifest, 9, Preprocess::ZeroPlanes, config()), InvalidArgument);
}

TEST_CASE("image errors carry the image path") {
    auto data = synthesize_dataset(5, 10, 64);
    data.images[3] = GrayImage(10, 10);
    const ForensicsExperiment exp(data.manifest, data.images, config());
    try {
        exp.features(0, Preprocess::None);
        FAIL("expected an error");
    } catch (const DegenerateInput& e) {
        CHECK(std::string(e.what()).find("authentic_00003.pgm") != std::string::npos);
    }
    data.images.pop_back();
    CHECK_THROWS_AS(ForensicsExperiment(data.manifest, data.images, config()), InvalidInput);
}
