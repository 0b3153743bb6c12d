#include <cmath>

#include "doctest.h"
#include "macfe/error.hpp"
#include "macfe/rng.hpp"
#include "macfe/stats.hpp"
#include "macfe/transforms.hpp"
#include "test_util.hpp"

using namespace macfe;

TEST_CASE("apply_unary: spec examples") {
    const auto square = make_transform(TransformKind::unary, "square");
    CHECK(apply_unary(square, std::vector<double>{1, -2, 3}) == std::vector<double>{1, 4, 9});

    const auto log_t = make_transform(TransformKind::unary, "log");
    CHECK(apply_unary(log_t, std::vector<double>{0})[0] == 0.0);
    CHECK(apply_unary(log_t, std::vector<double>{std::exp(1.0) - 1.0})[0] ==
          doctest::Approx(1.0).epsilon(1e-12));
    // signed: log(-x) = -log(x)
    CHECK(apply_unary(log_t, std::vector<double>{-3.0})[0] ==
          doctest::Approx(-std::log1p(3.0)).epsilon(1e-12));

    const auto reciprocal = make_transform(TransformKind::unary, "reciprocal");
    CHECK(apply_unary(reciprocal, std::vector<double>{0})[0] == 0.0);
}

TEST_CASE("apply_binary: spec examples") {
    const auto mult = make_transform(TransformKind::binary, "multiply");
    CHECK(apply_binary(mult, std::vector<double>{2, 3}, std::vector<double>{4, 5}) ==
          std::vector<double>{8, 15});

    const auto divide = make_transform(TransformKind::binary, "divide");
    CHECK(apply_binary(divide, std::vector<double>{1}, std::vector<double>{0})[0] == 0.0);

    const auto subtract = make_transform(TransformKind::binary, "subtract");
    const std::vector<double> x = {1.5, -2.5, 7.0};
    CHECK(apply_binary(subtract, x, x) == std::vector<double>{0, 0, 0});

    CHECK_THROWS_WITH_AS(apply_binary(mult, std::vector<double>{1.0}, std::vector<double>{1, 2}),
                         doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("registry: unknown names rejected") {
    CHECK_THROWS_WITH_AS(make_transform(TransformKind::unary, "cosine"),
                         doctest::Contains("UnknownTransform"), Error);
    CHECK_THROWS_AS(make_transform(TransformKind::binary, "log"), Error);
    CHECK(unary_names().size() == 7);
    CHECK(binary_names().size() == 4);
    CHECK(scaler_names().size() == 3);
}

TEST_CASE("totality: adversarial inputs stay finite for every transform") {
    const std::vector<double> adversarial = {0.0, 1e300, -1e300, 1e-300, -1e-300, 1.0, -1.0};
    for (const auto& name : unary_names()) {
        const auto out = apply_unary(make_transform(TransformKind::unary, name), adversarial);
        for (double v : out) CHECK(std::isfinite(v));
    }
    for (const auto& name : binary_names()) {
        const auto id = make_transform(TransformKind::binary, name);
        for (double a : adversarial) {
            for (double b : adversarial) {
                const auto out =
                    apply_binary(id, std::vector<double>{a}, std::vector<double>{b});
                CHECK(std::isfinite(out[0]));
            }
        }
    }
}

TEST_CASE("commutativity of add/multiply; subtract/divide are not") {
    Rng rng(21);
    std::vector<double> a(32), b(32);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.uniform(-10, 10);
        b[i] = rng.uniform(-10, 10);
    }
    for (const auto& name : binary_names()) {
        const auto id = make_transform(TransformKind::binary, name);
        const auto ab = apply_binary(id, a, b);
        const auto ba = apply_binary(id, b, a);
        if (is_commutative(id)) {
            CHECK(ab == ba);
        } else {
            CHECK(ab != ba);
        }
    }
}

TEST_CASE("scalers: minmax / standard / robust columns") {
    const std::vector<std::vector<double>> cols = {{2, 4, 6}};
    const auto minmax = fit_scaler(make_transform(TransformKind::scaler, "minmax"), cols);
    CHECK(apply_scaler(minmax, cols)[0] == std::vector<double>{0.0, 0.5, 1.0});

    const std::vector<std::vector<double>> c123 = {{1, 2, 3}};
    const auto standard = fit_scaler(make_transform(TransformKind::scaler, "standard"), c123);
    const auto z = apply_scaler(standard, c123)[0];
    // population std of {1,2,3} is sqrt(2/3): values +-sqrt(3/2)
    CHECK(z[0] == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-12));
    CHECK(z[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(z[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
    CHECK(mean(z) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(stddev(z) == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<std::vector<double>> heavy = {{1, 2, 3, 4, 100}};
    const auto robust = fit_scaler(make_transform(TransformKind::scaler, "robust"), heavy);
    const auto r = apply_scaler(robust, heavy)[0];
    // type-7 quantiles: Q1=2, median=3, Q3=4 -> (x-3)/2
    CHECK(r == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 48.5});
    CHECK(median(r) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("scalers: constant columns map to zero; fit/reuse consistency") {
    const std::vector<std::vector<double>> cols = {{5, 5, 5}, {1, 2, 4}};
    for (const auto& name : scaler_names()) {
        const auto params = fit_scaler(make_transform(TransformKind::scaler, name), cols);
        const auto out = apply_scaler(params, cols);
        CHECK(out[0] == std::vector<double>{0, 0, 0});
        // reusing parameters on the fitting data equals fitting fresh
        const auto params2 = fit_scaler(make_transform(TransformKind::scaler, name), cols);
        CHECK(apply_scaler(params2, cols) == out);
    }
}

TEST_CASE("minmax is idempotent on non-constant columns") {
    Rng rng(22);
    std::vector<std::vector<double>> cols = {std::vector<double>(40)};
    for (auto& v : cols[0]) v = rng.uniform(-30, 70);
    const auto id = make_transform(TransformKind::scaler, "minmax");
    const auto once = apply_scaler(fit_scaler(id, cols), cols);
    const auto twice = apply_scaler(fit_scaler(id, once), once);
    for (std::size_t i = 0; i < once[0].size(); ++i) {
        CHECK(twice[0][i] == doctest::Approx(once[0][i]).epsilon(1e-12));
    }
}

TEST_CASE("expression trees: order, printing, evaluation") {
    const auto log_t = make_transform(TransformKind::unary, "log");
    const auto square = make_transform(TransformKind::unary, "square");
    const auto mult = make_transform(TransformKind::binary, "multiply");

    const auto x1 = TransformExpr::leaf(0, "x1");
    const auto x2 = TransformExpr::leaf(1, "x2");
    const auto expr = TransformExpr::unary(
        square, TransformExpr::binary(mult, TransformExpr::unary(log_t, x1), x2));
    CHECK(expr.order() == 3);
    CHECK(expr.to_string() == "square(multiply(log(f:x1),f:x2))");

    const std::vector<std::vector<double>> cols = {{0.0, std::exp(1.0) - 1.0}, {2.0, 3.0}};
    const auto values = eval_expr(expr, cols);
    CHECK(values[0] == 0.0);
    CHECK(values[1] == doctest::Approx(9.0).epsilon(1e-12));

    // a bare leaf is not a generated feature
    CHECK_THROWS_AS(eval_expr(x1, cols), Error);
}

TEST_CASE("expression grammar round trip") {
    const std::vector<std::string> names = {"x1", "x2"};
    const std::string text = "square(multiply(log(f:x1),f:x2))";
    const auto parsed = TransformExpr::parse(text, names);
    CHECK(parsed.to_string() == text);
    CHECK(parsed.order() == 3);

    // random expressions survive print -> parse -> print
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<TransformExpr> pool = {TransformExpr::leaf(0, "x1"),
                                           TransformExpr::leaf(1, "x2")};
        for (int step = 0; step < 4; ++step) {
            if (rng.uniform() < 0.5) {
                const auto& name = unary_names()[rng.index(unary_names().size())];
                pool.push_back(TransformExpr::unary(make_transform(TransformKind::unary, name),
                                                    pool[rng.index(pool.size())]));
            } else {
                const auto& name = binary_names()[rng.index(binary_names().size())];
                pool.push_back(TransformExpr::binary(make_transform(TransformKind::binary, name),
                                                     pool[rng.index(pool.size())],
                                                     pool[rng.index(pool.size())]));
            }
        }
        const auto& expr = pool.back();
        CHECK(TransformExpr::parse(expr.to_string(), names).to_string() == expr.to_string());
    }

    CHECK_THROWS_AS(TransformExpr::parse("square(f:nope)", names), Error);
    CHECK_THROWS_AS(TransformExpr::parse("square(f:x1", names), Error);
}

TEST_CASE("transform tokens") {
    const auto id = make_transform(TransformKind::scaler, "robust");
    CHECK(transform_token(id) == "scaler:robust");
    CHECK(parse_transform_token("scaler:robust") == id);
    CHECK_THROWS_AS(parse_transform_token("robust"), Error);
    CHECK_THROWS_AS(parse_transform_token("scaler:nope"), Error);
}
