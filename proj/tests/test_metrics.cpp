#include <doctest.h>

#include <cmath>

#include "mmfuse/metrics.hpp"
#include "mmfuse/rng.hpp"

using namespace mmfuse;

TEST_CASE("nmse identities") {
    const Vec y{0.0, 2.0};
    CHECK(nmse(y, y) == 0.0);
    CHECK(nmse(y, {1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));

    // the mean predictor scores exactly 1 for any non-constant groundtruth
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Vec yy(2 + rng.index(40));
        for (double& v : yy) v = rng.uniform(-5, 5);
        double mean = 0.0;
        for (double v : yy) mean += v;
        mean /= static_cast<double>(yy.size());
        CHECK(std::fabs(nmse(yy, Vec(yy.size(), mean)) - 1.0) < 1e-12);
    }

    CHECK_THROWS_AS(nmse({1.0, 1.0}, {0.0, 0.0}), std::invalid_argument);  // constant y
    CHECK_THROWS_AS(nmse({1.0}, {0.0}), std::invalid_argument);            // N < 2
}

TEST_CASE("nmse is invariant under common positive rescaling") {
    Rng rng(5);
    Vec y(30), yhat(30);
    for (double& v : y) v = rng.uniform(-2, 2);
    for (double& v : yhat) v = rng.uniform(-2, 2);
    const double base = nmse(y, yhat);
    Vec y2 = y, yhat2 = yhat;
    for (double& v : y2) v *= 7.5;
    for (double& v : yhat2) v *= 7.5;
    CHECK(nmse(y2, yhat2) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("nmse_tmp hand example and scale invariance") {
    const std::vector<Vec> y{{0.0, 2.0}};
    const std::vector<Vec> yhat{{1.0, 1.0}};
    CHECK(nmse_tmp(y, y) == 0.0);
    CHECK(nmse_tmp(y, yhat) == doctest::Approx(1.0).epsilon(1e-15));

    std::vector<Vec> y2 = y, yhat2 = yhat;
    for (auto& seq : y2)
        for (double& v : seq) v *= 2.0;
    for (auto& seq : yhat2)
        for (double& v : seq) v *= 2.0;
    CHECK(nmse_tmp(y2, yhat2) == doctest::Approx(nmse_tmp(y, yhat)).epsilon(1e-12));

    CHECK_THROWS_AS(nmse_tmp({{3.0, 3.0}}, {{1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("src self, negated, and hand-evaluated examples") {
    const std::vector<Vec> y{{1.0, 2.0, 3.0}};
    std::vector<Vec> neg = y;
    for (double& v : neg[0]) v = -v;
    CHECK(src(y, y) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(src(y, neg) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(src(y, {{1.0, 3.0, 2.0}}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("src stays in [-1,1] under fuzzing") {
    Rng rng(7);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t t_len = 2 + rng.index(8);
        Vec a(t_len), b(t_len);
        for (double& v : a) v = rng.uniform(-10, 10);
        for (double& v : b) v = rng.uniform(-10, 10);
        const double r = src({a}, {b});
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("src affine invariance per sequence") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        Vec a(5), b(5);
        for (double& v : a) v = rng.uniform(-3, 3);
        for (double& v : b) v = rng.uniform(-3, 3);
        const double base = src({a}, {b});
        const double scale = rng.uniform(0.1, 4.0);
        const double shift = rng.uniform(-5, 5);
        Vec b_up = b, b_down = b;
        for (double& v : b_up) v = scale * v + shift;
        for (double& v : b_down) v = -scale * v + shift;
        CHECK(src({a}, {b_up}) == doctest::Approx(base).epsilon(1e-9));
        CHECK(src({a}, {b_down}) == doctest::Approx(-base).epsilon(1e-9));
    }
}

TEST_CASE("src constant sequences contribute zero") {
    const std::vector<Vec> y{{1.0, 2.0, 3.0}, {4.0, 4.0, 4.0}};
    const std::vector<Vec> yhat{{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}};
    CHECK(src(y, yhat) == doctest::Approx(0.5).epsilon(1e-12));  // (1 + 0) / 2
}

TEST_CASE("rank-based src variant uses ranks") {
    // a monotone but non-linear relation: ranks agree perfectly
    const std::vector<Vec> y{{1.0, 2.0, 3.0, 4.0}};
    const std::vector<Vec> yhat{{1.0, 10.0, 100.0, 1000.0}};
    CHECK(src(y, yhat, true) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(src(y, yhat, false) < 1.0);

    CHECK(rank_transform({3.0, 1.0, 2.0}) == Vec{3.0, 1.0, 2.0});
    CHECK(rank_transform({5.0, 5.0, 1.0}) == Vec{2.5, 2.5, 1.0});
}
