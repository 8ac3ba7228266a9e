#include "doctest.h"
#include "support.hpp"

#include "svmlab/dataset.hpp"
#include "svmlab/errors.hpp"
#include "svmlab/rng.hpp"

#include "fmt/format.h"

#include <cmath>
#include <cstring>

using namespace svmlab;

namespace {

ErrorKind kind_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("expected an svmlab::Error");
    return ErrorKind::InvalidArgument;
}

Dataset counts(std::size_t n_pos, std::size_t n_neg) {
    std::vector<Sample> s;
    for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
        s.push_back({ { static_cast<double>(i), 0.5 * static_cast<double>(i % 7) }, i < n_pos ? kPositive : kNegative });
    }
    return Dataset{ "counts", std::move(s) };
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("load_csv maps the chosen raw label to +1 and keeps row order") {
    testing::TempDir tmp;
    const auto p = tmp.write("four.csv", "1,2,a\n3,4,a\n5,6,b\n7,8,b\n");
    CsvOptions opts;
    opts.positive_label = "a";
    const auto ds = load_csv(p, opts);
    REQUIRE(ds.size() == 4);
    CHECK(ds.dim() == 2);
    CHECK(ds.label(0) == kPositive);
    CHECK(ds.label(1) == kPositive);
    CHECK(ds.label(2) == kNegative);
    CHECK(ds.label(3) == kNegative);
    CHECK(ds.row(2)[1] == 6.0);
    CHECK(ds.name() == "four");
}

TEST_CASE("load_csv defaults the positive label to the minority class") {
    testing::TempDir tmp;
    const auto p = tmp.write("m.csv", "0,x\n1,x\n2,y\n3,x\n");
    const auto ds = load_csv(p);
    CHECK(ds.label(2) == kPositive);
    CHECK(ds.count(kPositive) == 1);

    const auto tie = tmp.write("t.csv", "0,q\n1,r\n");
    const auto t = load_csv(tie);
    CHECK(t.label(0) == kPositive);
}

TEST_CASE("load_csv detects headers and selects the label column by name or index") {
    testing::TempDir tmp;
    const auto p = tmp.write("h.csv", "cls,f1,f2\n1,0.5,1.5\n2,2.5,3.5\n2,4.5,5.5\n");
    CsvOptions by_name;
    by_name.label_column = std::string{ "cls" };
    const auto a = load_csv(p, by_name);
    CHECK(a.size() == 3);
    CHECK(a.dim() == 2);
    CHECK(a.row(0)[0] == 0.5);
    CHECK(a.label(0) == kPositive);

    CsvOptions by_index;
    by_index.label_column = 0L;
    const auto b = load_csv(p, by_index);
    CHECK(b.size() == 3);
    CHECK(b.row(2)[1] == 5.5);

    CsvOptions missing;
    missing.label_column = std::string{ "nope" };
    CHECK(kind_of([&] { (void)load_csv(p, missing); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("load_csv error kinds") {
    testing::TempDir tmp;
    CHECK(kind_of([&] { (void)load_csv(tmp.write("three.csv", "1,a\n2,b\n3,c\n")); }) == ErrorKind::LabelCardinality);
    CHECK(kind_of([&] { (void)load_csv(tmp.write("one.csv", "1,a\n2,a\n")); }) == ErrorKind::LabelCardinality);
    CHECK(kind_of([&] { (void)load_csv(tmp.write("ragged.csv", "1,2,a\n3,b\n")); }) == ErrorKind::MalformedRow);
    CHECK(kind_of([&] { (void)load_csv(tmp.write("text.csv", "1,2,a\n3,oops,b\n")); }) == ErrorKind::MalformedRow);
    CHECK(kind_of([&] { (void)load_csv(tmp.write("thousands.csv", "1,a\n\"1,000\",b\n")); }) == ErrorKind::MalformedRow);
    CHECK(kind_of([&] { (void)load_csv(tmp.write("empty.csv", "")); }) == ErrorKind::EmptyFile);
    CHECK(kind_of([&] { (void)load_csv(tmp.write("blank.csv", "\n\n")); }) == ErrorKind::EmptyFile);
    CHECK(kind_of([&] { (void)load_csv(tmp.write("hdr.csv", "a,b,c\n")); }) == ErrorKind::EmptyFile);
    CHECK(kind_of([&] { (void)load_csv(tmp.path() / "absent.csv"); }) == ErrorKind::IoError);
    CsvOptions bad;
    bad.positive_label = "z";
    CHECK(kind_of([&] { (void)load_csv(tmp.write("ok.csv", "1,a\n2,b\n"), bad); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("dataset construction invariants") {
    CHECK(kind_of([] { Dataset("x", { { { 1.0 }, kPositive } }); }) == ErrorKind::TooFewSamples);
    CHECK(kind_of([] { Dataset("x", { { { 1.0 }, kPositive }, { { 1.0, 2.0 }, kNegative } }); }) == ErrorKind::DimensionMismatch);
    CHECK(kind_of([] { Dataset("x", { { { 1.0 }, 2 }, { { 1.0 }, kNegative } }); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { Dataset("x", 2, { 1.0, 2.0, 3.0 }, { 1, -1 }); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("save_csv round-trips every feature bit-exactly") {
    testing::TempDir tmp;
    Rng rng{ 99 };
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 3; ++j) {
            values.push_back((uniform01(rng) - 0.5) * std::pow(10.0, static_cast<double>(uniform_below(rng, 30)) - 15.0));
        }
        labels.push_back(i % 3 == 0 ? kPositive : kNegative);
    }
    values[0] = 0.1;
    values[1] = -0.0;
    values[2] = 5e-324;
    const Dataset ds{ "rt", 3, values, labels };
    const auto p = tmp.path() / "rt.csv";
    save_csv(ds, p);
    CsvOptions opts;
    opts.positive_label = "1";
    const auto back = load_csv(p, opts);
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.label(i) == ds.label(i));
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(std::memcmp(&back.row(i)[j], &ds.row(i)[j], sizeof(double)) == 0);
        }
    }
}

TEST_CASE("class_stats") {
    const auto a = class_stats(counts(10, 5));
    CHECK(a.n_majority == 10);
    CHECK(a.n_minority == 5);
    CHECK(a.majority_label == kPositive);
    CHECK(a.imbalance_ratio == 2.0);

    const auto b = class_stats(counts(50, 50));
    CHECK(b.imbalance_ratio == 1.0);
    CHECK(b.majority_label == kPositive);

    const auto g = class_stats(counts(13, 201));
    CHECK(g.majority_label == kNegative);
    CHECK(g.minority_label() == kPositive);
    CHECK(g.imbalance_ratio == doctest::Approx(201.0 / 13.0));
    CHECK(fmt::format("{:.1f}", g.imbalance_ratio) == "15.5");
    CHECK(g.imbalance_ratio * 13.0 == 201.0);

    CHECK(kind_of([] { (void)class_stats(counts(4, 0)); }) == ErrorKind::SingleClass);
}

TEST_CASE("intra_class_distance_range") {
    SUBCASE("coincident points") {
        const Dataset ds{ "c", { { { 1.0, 1.0 }, kPositive }, { { 1.0, 1.0 }, kPositive }, { { 2.0, 2.0 }, kNegative }, { { 2.0, 2.0 }, kNegative } } };
        const auto dr = intra_class_distance_range(ds);
        CHECK(dr.min_intra == 0.0);
        CHECK(dr.max_intra == 0.0);
    }
    SUBCASE("hand-computed set") {
        const Dataset ds{ "h", { { { 0.0, 0.0 }, kPositive }, { { 3.0, 4.0 }, kPositive }, { { 1.0, 1.0 }, kNegative }, { { 1.0, 2.0 }, kNegative } } };
        const auto dr = intra_class_distance_range(ds);
        CHECK(dr.max_intra == 5.0);
        CHECK(dr.min_intra == 1.0);
        CHECK(dr.per_class_max[0] == 5.0);
        CHECK(dr.per_class_max[1] == 1.0);
        CHECK(dr.per_class_min[0] == 5.0);
    }
    SUBCASE("zeros excluded from min_intra but kept per class") {
        const Dataset ds{ "z", { { { 0.0 }, kPositive }, { { 0.0 }, kPositive }, { { 2.0 }, kPositive }, { { 5.0 }, kNegative }, { { 8.0 }, kNegative } } };
        const auto dr = intra_class_distance_range(ds);
        CHECK(dr.per_class_min[0] == 0.0);
        CHECK(dr.min_intra == 2.0);
        CHECK(dr.max_intra == 3.0);
    }
    SUBCASE("degenerate class") {
        const Dataset ds{ "d", { { { 0.0 }, kPositive }, { { 1.0 }, kNegative }, { { 2.0 }, kNegative } } };
        CHECK(kind_of([&] { (void)intra_class_distance_range(ds); }) == ErrorKind::DegenerateClass);
    }
}

TEST_CASE("stratified_folds") {
    SUBCASE("exact divisibility") {
        const auto ds = counts(5, 5);
        const auto plan = stratified_folds(ds, 5, 7);
        for (std::size_t f = 0; f < 5; ++f) {
            std::size_t pos = 0;
            std::size_t neg = 0;
            for (const auto i : plan.test_indices(f)) {
                (ds.label(i) == kPositive ? pos : neg)++;
            }
            CHECK(pos == 1);
            CHECK(neg == 1);
        }
    }
    SUBCASE("glass4 counts give two or three minority samples per fold") {
        const auto ds = counts(13, 201);
        const auto plan = stratified_folds(ds, 5, 1);
        std::size_t total = 0;
        for (std::size_t f = 0; f < 5; ++f) {
            std::size_t minority = 0;
            for (const auto i : plan.test_indices(f)) {
                minority += ds.label(i) == kPositive;
            }
            CHECK(minority >= 2);
            CHECK(minority <= 3);
            total += plan.test_indices(f).size();
            CHECK(plan.test_indices(f).size() + plan.train_indices(f).size() == ds.size());
        }
        CHECK(total == ds.size());
    }
    SUBCASE("deterministic under a fixed seed") {
        const auto ds = counts(30, 17);
        CHECK(stratified_folds(ds, 4, 123).assignments == stratified_folds(ds, 4, 123).assignments);
        CHECK(stratified_folds(ds, 4, 123).assignments != stratified_folds(ds, 4, 124).assignments);
    }
    SUBCASE("errors") {
        const auto ds = counts(3, 3);
        CHECK(kind_of([&] { (void)stratified_folds(ds, 7, 1); }) == ErrorKind::TooFewSamples);
        CHECK(kind_of([&] { (void)stratified_folds(ds, 1, 1); }) == ErrorKind::InvalidArgument);
    }
}

TEST_CASE("min-max scaler") {
    const Dataset ds{ "s", { { { 1.0, 5.0 }, kPositive }, { { 3.0, 5.0 }, kNegative }, { { 2.0, 5.0 }, kNegative } } };
    const std::vector<std::size_t> rows{ 0, 1 };
    const auto s = MinMaxScaler::fit(ds, rows);
    const auto t = s.transform(ds.row(2));
    CHECK(t[0] == 0.5);
    CHECK(t[1] == 0.0);
    const auto all = s.transform(ds);
    CHECK(all.row(1)[0] == 1.0);
    CHECK(kind_of([&] { (void)s.transform(std::vector<double>{ 1.0 }); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("iris two-class file") {
    const auto p = testing::data_dir() / "iris2.csv";
    if (!std::filesystem::exists(p)) {
        MESSAGE("iris2.csv not available; skipped");
        return;
    }
    const auto ds = load_csv(p);
    CHECK(ds.size() == 100);
    CHECK(ds.dim() == 4);
    const auto dr = intra_class_distance_range(ds);
    const double max_a = std::max(dr.per_class_max[0], dr.per_class_max[1]);
    const double max_b = std::min(dr.per_class_max[0], dr.per_class_max[1]);
    CHECK(max_b == doctest::Approx(2.43).epsilon(0.005));
    CHECK(std::abs(max_a - 2.65) <= 0.07);
    CHECK(dr.min_intra == doctest::Approx(0.1).epsilon(1e-9));
}

}
