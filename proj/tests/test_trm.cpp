#include <cmath>

#include "doctest.h"
#include "macfe/error.hpp"
#include "macfe/rng.hpp"
#include "macfe/stats.hpp"
#include "macfe/trm.hpp"
#include "test_util.hpp"

using namespace macfe;
using testutil::TempDir;

namespace {

constexpr std::size_t kEta = kMetaFeatureCount + 10;

Trm identity_trm(std::vector<TrmRecord> records) {
    Trm trm;
    trm.records = std::move(records);
    trm.bins = 10;
    trm.fingerprint = make_fingerprint(10);
    trm.norm_stats.assign(kEta, {0.0, 1.0});  // normalization is the identity on [0,1]
    return trm;
}

std::vector<double> basis(std::size_t at, double value = 1.0) {
    std::vector<double> v(kEta, 0.0);
    v[at] = value;
    return v;
}

FeatureEncoding query(std::vector<double> values) {
    FeatureEncoding e;
    e.values = std::move(values);
    e.histogram_bins = 10;
    e.dataset_name = "q";
    e.feature_name = "f";
    return e;
}

TrmRecord unary_record(std::vector<double> enc, std::string_view name, double gain,
                       std::string source) {
    TrmRecord r;
    r.kind = TransformKind::unary;
    r.enc_a = std::move(enc);
    r.transform = make_transform(TransformKind::unary, name);
    r.gain_a = gain;
    r.source = std::move(source);
    return r;
}

Dataset product_plant(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> cols(2, std::vector<double>(160));
    std::vector<int> y(160);
    for (std::size_t i = 0; i < 160; ++i) {
        cols[0][i] = rng.uniform(-1, 1);
        cols[1][i] = rng.uniform(-1, 1);
        y[i] = cols[0][i] * cols[1][i] > 0 ? 1 : 0;
    }
    return testutil::make_ds(std::move(cols), std::move(y), true, "plant");
}

}  // namespace

TEST_CASE("train_trm: record counting for one 2-feature dataset") {
    const Trm trm = train_trm({product_plant(81)});
    CHECK(trm.count(TransformKind::unary) <= 2);
    CHECK(trm.count(TransformKind::binary) <= 4);
    CHECK(trm.count(TransformKind::scaler) == 1);
    CHECK(trm.fingerprint == make_fingerprint(10));
    // the planted product structure must be stored
    bool found_multiply = false;
    for (const auto& r : trm.records) {
        if (r.kind == TransformKind::binary && r.transform.name == "multiply") {
            found_multiply = true;
            CHECK(r.gain_a > 0.0);
            CHECK(r.gain_b > 0.0);
            CHECK(r.enc_a.size() == kEta);
            CHECK(r.enc_b.size() == kEta);
        }
    }
    CHECK(found_multiply);
}

TEST_CASE("train_trm: all stored gains are strictly positive") {
    const Trm trm = train_trm({product_plant(82), product_plant(83)});
    for (const auto& r : trm.records) {
        if (r.kind == TransformKind::unary) CHECK(r.gain_a > 0.0);
        if (r.kind == TransformKind::binary) {
            CHECK(r.gain_a > 0.0);
            CHECK(r.gain_b > 0.0);
        }
    }
}

TEST_CASE("train_trm: feature with no improving transform gets no unary record") {
    // y is a monotone threshold of x: MIC is already maximal, every unary
    // transform is rank-preserving or folds signal away
    Rng rng(84);
    std::vector<double> x(150);
    std::vector<int> y(150);
    for (std::size_t i = 0; i < 150; ++i) {
        x[i] = rng.uniform(0, 1);
        y[i] = x[i] > 0.5 ? 1 : 0;
    }
    const auto d = testutil::make_ds({x}, y, true, "mono");
    const Trm trm = train_trm({d});
    CHECK(trm.count(TransformKind::unary) == 0);
    CHECK(trm.count(TransformKind::scaler) == 1);
}

TEST_CASE("train_trm: empty corpus and unpreprocessed input are rejected") {
    CHECK_THROWS_WITH_AS(train_trm({}), doctest::Contains("EmptyCorpus"), Error);
    Dataset raw = product_plant(85);
    raw.preprocessed = false;
    CHECK_THROWS_AS(train_trm({raw}), Error);
}

TEST_CASE("train_trm: deterministic over a fixed corpus, threads do not matter") {
    const std::vector<Dataset> corpus = {product_plant(86), product_plant(87)};
    TrmTrainConfig cfg1;
    TrmTrainConfig cfg2;
    cfg2.threads = 2;
    const Trm a = train_trm(corpus, cfg1);
    const Trm b = train_trm(corpus, cfg2);
    CHECK(a.records == b.records);
    CHECK(a.norm_stats == b.norm_stats);
}

TEST_CASE("lookup_unary: identical encoding scores exactly 1") {
    const auto enc = basis(2, 0.7);
    const Trm trm = identity_trm({unary_record(enc, "log", 0.2, "a/f1")});
    const auto hit = lookup_unary(trm, query(enc), 0.5);
    REQUIRE(hit.has_value());
    CHECK(hit->similarity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hit->transform.name == "log");
}

TEST_CASE("lookup_unary: orthogonal encodings miss any positive threshold") {
    const Trm trm = identity_trm({unary_record(basis(0), "log", 0.2, "a/f1")});
    CHECK(!lookup_unary(trm, query(basis(1)), 0.1).has_value());
    // tau = 0 restores take-the-most-similar behavior
    CHECK(lookup_unary(trm, query(basis(1)), 0.0).has_value());
}

TEST_CASE("lookup_unary: 45-degree query scores sqrt(2)/2") {
    const Trm trm = identity_trm({unary_record(basis(0), "sqrt", 0.1, "a/f1")});
    std::vector<double> diag = basis(0);
    diag[1] = 1.0;
    const auto hit = lookup_unary(trm, query(diag), 0.5);
    REQUIRE(hit.has_value());
    CHECK(hit->similarity == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
    CHECK(!lookup_unary(trm, query(diag), 0.71).has_value());  // below tau -> none
}

TEST_CASE("lookup_unary: ties keep the earliest record") {
    const Trm trm = identity_trm({unary_record(basis(3), "log", 0.2, "a/f1"),
                                  unary_record(basis(3), "cube", 0.2, "a/f2")});
    const auto hit = lookup_unary(trm, query(basis(3)), 0.9);
    REQUIRE(hit.has_value());
    CHECK(hit->transform.name == "log");
    CHECK(hit->record_index == 0);
}

TEST_CASE("lookup_unary: zero-vector query returns none") {
    const Trm trm = identity_trm({unary_record(basis(0), "log", 0.2, "a/f1")});
    CHECK(!lookup_unary(trm, query(std::vector<double>(kEta, 0.0)), 0.0).has_value());
}

TEST_CASE("lookup_unary: config mismatch and empty TRM") {
    const Trm trm = identity_trm({unary_record(basis(0), "log", 0.2, "a/f1")});
    FeatureEncoding wrong = query(std::vector<double>(kMetaFeatureCount + 5, 1.0));
    wrong.histogram_bins = 5;
    CHECK_THROWS_WITH_AS(lookup_unary(trm, wrong, 0.5), doctest::Contains("ConfigMismatch"),
                         Error);
    const Trm empty = identity_trm({});
    CHECK_THROWS_WITH_AS(lookup_unary(empty, query(basis(0)), 0.5),
                         doctest::Contains("EmptyTrm"), Error);
}

TEST_CASE("lookup_binary: stored pair and swapped pair") {
    TrmRecord rec;
    rec.kind = TransformKind::binary;
    rec.enc_a = basis(0);
    rec.enc_b = basis(1);
    rec.transform = make_transform(TransformKind::binary, "divide");
    rec.gain_a = 0.1;
    rec.gain_b = 0.1;
    rec.source = "a/f1+f2/divide";
    const Trm trm = identity_trm({rec});

    const auto forward = lookup_binary(trm, query(basis(0)), query(basis(1)), 0.5);
    REQUIRE(forward.has_value());
    CHECK(forward->similarity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(!forward->swapped);

    const auto swapped = lookup_binary(trm, query(basis(1)), query(basis(0)), 0.5);
    REQUIRE(swapped.has_value());
    CHECK(swapped->similarity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(swapped->swapped);
}

TEST_CASE("lookup_binary: empty section returns none") {
    const Trm trm = identity_trm({unary_record(basis(0), "log", 0.2, "a/f1")});
    CHECK(!lookup_binary(trm, query(basis(0)), query(basis(1)), 0.0).has_value());
}

TEST_CASE("lookup_scaler: nearest dataset encoding wins; single record always returned") {
    TrmRecord s1;
    s1.kind = TransformKind::scaler;
    s1.enc_a = std::vector<double>(kMetaFeatureCount, 0.0);
    s1.enc_a[0] = 1.0;
    s1.transform = make_transform(TransformKind::scaler, "robust");
    s1.source = "d1";
    TrmRecord s2 = s1;
    s2.enc_a[0] = 0.0;
    s2.enc_a[1] = 1.0;
    s2.transform = make_transform(TransformKind::scaler, "minmax");
    s2.source = "d2";

    const Trm trm = identity_trm({s1, s2});
    DatasetEncoding de;
    de.values.fill(0.0);
    de.values[0] = 0.1;
    de.values[1] = 0.9;  // strictly closer to s2's encoding
    CHECK(lookup_scaler(trm, de).name == "minmax");

    const Trm single = identity_trm({s1});
    DatasetEncoding anywhere;
    anywhere.values.fill(0.3);
    CHECK(lookup_scaler(single, anywhere).name == "robust");

    const Trm none = identity_trm({unary_record(basis(0), "log", 0.2, "a/f1")});
    CHECK_THROWS_WITH_AS(lookup_scaler(none, de), doctest::Contains("EmptyTrm"), Error);
}

TEST_CASE("lookup result invariant to record shuffling (unique maximum)") {
    const auto target = basis(4, 0.9);
    std::vector<TrmRecord> records = {unary_record(basis(1), "log", 0.2, "a/f1"),
                                      unary_record(target, "cube", 0.4, "a/f2"),
                                      unary_record(basis(2), "sqrt", 0.3, "a/f3")};
    const Trm trm = identity_trm(records);
    std::swap(records[0], records[2]);
    std::swap(records[1], records[2]);
    const Trm shuffled = identity_trm(records);
    const auto a = lookup_unary(trm, query(target), 0.5);
    const auto b = lookup_unary(shuffled, query(target), 0.5);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->transform == b->transform);
    CHECK(a->similarity == b->similarity);
}

TEST_CASE("save/load: trained TRM round-trips bit-exactly") {
    TempDir dir;
    const Trm trm = train_trm({product_plant(91), product_plant(92)});
    const auto path = dir.path("model.trm");
    save_trm(trm, path);
    const Trm loaded = load_trm(path);
    CHECK(loaded.fingerprint == trm.fingerprint);
    CHECK(loaded.bins == trm.bins);
    CHECK(loaded.norm_stats == trm.norm_stats);
    REQUIRE(loaded.records.size() == trm.records.size());
    for (std::size_t i = 0; i < trm.records.size(); ++i) {
        CHECK(loaded.records[i] == trm.records[i]);
    }
}

TEST_CASE("save/load: sources with spaces and separators survive") {
    TempDir dir;
    auto rec = unary_record(basis(0, 0.123456789012345678), "log", 1e-17, "my data/f %1;x");
    const Trm trm = identity_trm({rec});
    const auto path = dir.path("escaped.trm");
    save_trm(trm, path);
    const Trm loaded = load_trm(path);
    CHECK(loaded.records[0].source == "my data/f %1;x");
    CHECK(loaded.records[0].gain_a == 1e-17);
    CHECK(loaded.records[0].enc_a == rec.enc_a);
}

TEST_CASE("load: version mismatch, checksum corruption, truncation") {
    TempDir dir;
    const Trm trm = train_trm({product_plant(93)});
    const auto path = dir.path("model.trm");
    save_trm(trm, path);
    std::string content = testutil::read_file(path);

    // version bump
    std::string versioned = content;
    versioned.replace(versioned.find("v1"), 2, "v9");
    testutil::write_file(dir, "v.trm", versioned);
    CHECK_THROWS_WITH_AS(load_trm(dir.path("v.trm")), doctest::Contains("VersionMismatch"),
                         Error);

    // flip one body byte (after the checksum header line)
    std::string corrupted = content;
    const auto body_at = corrupted.find("\nU ");
    const auto flip_at = body_at == std::string::npos ? corrupted.find("\nS ") + 4 : body_at + 4;
    corrupted[flip_at] = corrupted[flip_at] == 'x' ? 'z' : 'x';
    testutil::write_file(dir, "c.trm", corrupted);
    CHECK_THROWS_WITH_AS(load_trm(dir.path("c.trm")), doctest::Contains("CorruptFile"), Error);

    // truncation
    testutil::write_file(dir, "t.trm", content.substr(0, content.size() / 2));
    CHECK_THROWS_WITH_AS(load_trm(dir.path("t.trm")), doctest::Contains("CorruptFile"), Error);

    // not a TRM file at all
    testutil::write_file(dir, "junk.trm", "hello world\n");
    CHECK_THROWS_AS(load_trm(dir.path("junk.trm")), Error);
}

TEST_CASE("load: trailing garbage after the declared records is rejected") {
    TempDir dir;
    const Trm trm = identity_trm({unary_record(basis(0), "log", 0.5, "a/f1")});
    const auto path = dir.path("model.trm");
    save_trm(trm, path);
    std::string content = testutil::read_file(path);
    // appending a record line invalidates the checksum -> strict reject
    content += "U extra log 0.5";
    for (std::size_t i = 0; i < kEta; ++i) content += " 0";
    content += "\n";
    testutil::write_file(dir, "g.trm", content);
    CHECK_THROWS_WITH_AS(load_trm(dir.path("g.trm")), doctest::Contains("CorruptFile"), Error);
}
