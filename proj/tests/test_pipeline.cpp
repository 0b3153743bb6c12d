#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "macfe/error.hpp"
#include "macfe/pipeline.hpp"
#include "macfe/rng.hpp"
#include "test_util.hpp"

using namespace macfe;
using testutil::TempDir;

namespace {

constexpr std::size_t kEta = kMetaFeatureCount + 10;

Trm bare_trm(std::vector<TrmRecord> records) {
    Trm trm;
    trm.records = std::move(records);
    trm.bins = 10;
    trm.fingerprint = make_fingerprint(10);
    trm.norm_stats.assign(kEta, {0.0, 1.0});
    return trm;
}

TrmRecord log_record() {
    TrmRecord r;
    r.kind = TransformKind::unary;
    r.enc_a.assign(kEta, 0.5);
    r.transform = make_transform(TransformKind::unary, "log");
    r.gain_a = 0.25;
    r.source = "corpus/f";
    return r;
}

TrmRecord multiply_record() {
    TrmRecord r;
    r.kind = TransformKind::binary;
    r.enc_a.assign(kEta, 0.5);
    r.enc_b.assign(kEta, 0.25);
    r.transform = make_transform(TransformKind::binary, "multiply");
    r.gain_a = 0.3;
    r.gain_b = 0.3;
    r.source = "corpus/f+g/multiply";
    return r;
}

TrmRecord minmax_record() {
    TrmRecord r;
    r.kind = TransformKind::scaler;
    r.enc_a.assign(kMetaFeatureCount, 0.5);
    r.transform = make_transform(TransformKind::scaler, "minmax");
    r.source = "corpus";
    return r;
}

// wide-spread positive columns keep log genuinely non-linear, so generated
// columns survive the correlation dedup
Dataset spread_dataset(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> cols(2, std::vector<double>(n));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cols[0][i] = std::exp(rng.uniform(-2.0, 4.0));
        cols[1][i] = std::exp(rng.uniform(-1.0, 3.0));
        y[i] = cols[0][i] * cols[1][i] > 8.0 ? 1 : 0;
    }
    return testutil::make_ds(std::move(cols), std::move(y), true, "spread");
}

PipelineConfig fast_config() {
    PipelineConfig cfg;
    cfg.depth = 1;
    cfg.s_select = 1.0;
    cfg.tau = 0.0;
    cfg.cap_factor = 50.0;
    return cfg;
}

}  // namespace

TEST_CASE("transform_dataset: unattainable tau yields originals plus scaler only") {
    const Dataset d = spread_dataset(80, 301);
    const Trm trm = bare_trm({log_record(), multiply_record(), minmax_record()});
    PipelineConfig cfg = fast_config();
    cfg.tau = 1.0 + 1e-9;
    const EngineeredDataset out = transform_dataset(d, trm, cfg);
    CHECK(out.generated.empty());
    CHECK(out.selected.size() == 2);
    CHECK(out.scaler.id.name == "minmax");
    CHECK(out.column_names() == std::vector<std::string>{"c1", "c2"});
}

TEST_CASE("transform_dataset: single log record produces log(f:c1)") {
    const Dataset d = spread_dataset(80, 302);
    const Trm trm = bare_trm({log_record(), minmax_record()});
    const EngineeredDataset out = transform_dataset(d, trm, fast_config());
    bool found = false;
    for (const auto& g : out.generated) {
        if (g.expr.to_string() == "log(f:c1)") {
            found = true;
            CHECK(g.expr.order() == 1);
            CHECK(g.round == 1);
        }
    }
    CHECK(found);
}

TEST_CASE("transform_dataset: depth 2 composes an order-3 column") {
    const Dataset d = spread_dataset(90, 303);
    const Trm trm = bare_trm({log_record(), multiply_record(), minmax_record()});
    PipelineConfig cfg = fast_config();
    cfg.depth = 2;
    const EngineeredDataset out = transform_dataset(d, trm, cfg);
    // unary over a round-1 product: log(multiply(...)) with a unary inside,
    // the same shape as square(mult(log(x1),x2))
    bool found = false;
    for (const auto& g : out.generated) {
        const std::string text = g.expr.to_string();
        if (g.expr.order() == 3 && text.rfind("log(multiply(", 0) == 0 &&
            text.find("log(f:", 13) != std::string::npos) {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("transform_dataset: generation cap and column bound") {
    const Dataset d = spread_dataset(70, 304);
    const Trm trm = bare_trm({log_record(), multiply_record(), minmax_record()});
    PipelineConfig cfg = fast_config();
    cfg.depth = 3;
    cfg.cap_factor = 1.0;  // cap = ceil(1.0 * 2) = 2 generated columns
    const EngineeredDataset out = transform_dataset(d, trm, cfg);
    CHECK(out.generated.size() <= 2);
    CHECK(out.column_names().size() <= out.selected.size() + 2);
    bool noted = false;
    for (const auto& note : out.notes) {
        if (note.find("cap") != std::string::npos) noted = true;
    }
    CHECK(noted);
}

TEST_CASE("transform_dataset: lineage reproduces generated values bit-exactly") {
    const Dataset d = spread_dataset(100, 305);
    const Trm trm = bare_trm({log_record(), multiply_record(), minmax_record()});
    PipelineConfig cfg = fast_config();
    cfg.depth = 2;
    cfg.cap_factor = 10.0;
    const EngineeredDataset out = transform_dataset(d, trm, cfg);
    REQUIRE(!out.generated.empty());
    for (const auto& g : out.generated) {
        CHECK(eval_expr(g.expr, out.base.x) == g.values);
    }
    // full plan re-application on the fitting data reproduces the scaled matrix
    CHECK(apply_plan(out, d) == out.scaled_columns());
}

TEST_CASE("transform_dataset: deterministic") {
    const Dataset d = spread_dataset(80, 306);
    const Trm trm = bare_trm({log_record(), multiply_record(), minmax_record()});
    PipelineConfig cfg = fast_config();
    cfg.depth = 2;
    const EngineeredDataset a = transform_dataset(d, trm, cfg);
    const EngineeredDataset b = transform_dataset(d, trm, cfg);
    CHECK(a.column_names() == b.column_names());
    CHECK(a.scaled_columns() == b.scaled_columns());
    CHECK(lineage_json(a, cfg) == lineage_json(b, cfg));
}

TEST_CASE("transform_dataset: fingerprint and argument validation") {
    const Dataset d = spread_dataset(60, 307);
    const Trm trm = bare_trm({log_record(), minmax_record()});
    PipelineConfig cfg = fast_config();
    cfg.bins = 8;
    CHECK_THROWS_WITH_AS(transform_dataset(d, trm, cfg), doctest::Contains("ConfigMismatch"),
                         Error);
    cfg = fast_config();
    cfg.depth = 0;
    CHECK_THROWS_AS(transform_dataset(d, trm, cfg), Error);
    cfg = fast_config();
    cfg.s_select = 0.0;
    CHECK_THROWS_WITH_AS(transform_dataset(d, trm, cfg), doctest::Contains("BadThreshold"),
                         Error);
}

TEST_CASE("transform_dataset: causal selection restricts the originals") {
    // c2 is pure noise; with s_select = 0.5 only the predictive feature stays
    Rng rng(308);
    std::vector<std::vector<double>> cols(2, std::vector<double>(400));
    std::vector<int> y(400);
    for (std::size_t i = 0; i < 400; ++i) {
        cols[0][i] = rng.normal();
        cols[1][i] = rng.normal();
        y[i] = cols[0][i] + 0.3 * rng.normal() > 0 ? 1 : 0;
    }
    const Dataset d = testutil::make_ds(std::move(cols), std::move(y), true, "sel");
    const Trm trm = bare_trm({minmax_record()});
    PipelineConfig cfg = fast_config();
    cfg.s_select = 0.5;
    const EngineeredDataset out = transform_dataset(d, trm, cfg);
    CHECK(out.selected == std::vector<std::size_t>{0});
    CHECK(out.base.columns[0].name == "c1");
}

TEST_CASE("dedup_accept: duplicates, constants, scaled copies") {
    const std::vector<std::vector<double>> existing = {{1, 2, 3, 4}, {4, 1, 3, 2}};
    CHECK(!dedup_accept(std::vector<double>{2, 4, 6, 8}, existing));  // 2x first column
    CHECK(!dedup_accept(std::vector<double>{1, 2, 3, 4}, existing));  // exact duplicate
    CHECK(!dedup_accept(std::vector<double>{7, 7, 7, 7}, existing));  // constant
    CHECK(dedup_accept(std::vector<double>{1, -5, 2, 9}, existing));
    Rng rng(309);
    std::vector<double> random_col(4);
    for (auto& v : random_col) v = rng.normal();
    CHECK(dedup_accept(random_col, existing));
}

TEST_CASE("write_engineered_csv and lineage_json round trip") {
    TempDir dir;
    const Dataset d = spread_dataset(50, 310);
    const Trm trm = bare_trm({log_record(), minmax_record()});
    PipelineConfig cfg = fast_config();
    const EngineeredDataset out = transform_dataset(d, trm, cfg);
    REQUIRE(!out.generated.empty());

    const auto csv_path = dir.path("eng.csv");
    write_engineered_csv(out, csv_path);
    const Dataset reloaded = load_csv(csv_path, "y");
    CHECK(reloaded.n_instances() == d.n_instances());
    CHECK(reloaded.n_features() == out.column_names().size());

    // the sidecar's expressions evaluate back to the pre-scaling columns
    const auto doc = nlohmann::json::parse(lineage_json(out, cfg));
    CHECK(doc.at("scaler") == "scaler:minmax");
    std::vector<std::string> names;
    for (const auto& c : out.base.columns) names.push_back(c.name);
    std::size_t idx = 0;
    for (const auto& item : doc.at("generated")) {
        const auto expr = TransformExpr::parse(item.at("expr").get<std::string>(), names);
        CHECK(eval_expr(expr, out.base.x) == out.generated[idx].values);
        idx++;
    }
    CHECK(idx == out.generated.size());
}
