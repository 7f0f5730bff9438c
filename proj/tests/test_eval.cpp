#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "beansplit/eval.hpp"
#include "test_support.hpp"

using namespace beansplit;

TEST_CASE("average precision hand cases", "[eval]") {
    // perfect ranking
    CHECK(average_precision(std::vector<double>{0.9, 0.8, 0.2, 0.1},
                            std::vector<int>{1, 1, 0, 0}) == 1.0);
    // (0.9,+), (0.8,-), (0.7,+): (1/1 + 2/3) / 2
    CHECK_THAT(average_precision(std::vector<double>{0.9, 0.8, 0.7},
                                 std::vector<int>{1, 0, 1}),
               Catch::Matchers::WithinAbs(5.0 / 6.0, 1e-15));

    try {
        average_precision(std::vector<double>{0.5}, std::vector<int>{0});
        FAIL("expected NoPositives");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoPositives);
    }
}

TEST_CASE("average precision is a rank statistic", "[eval]") {
    Rng rng(401);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        scores.push_back(rng.uniform());
        labels.push_back(rng.uniform() < 0.3 ? 1 : 0);
    }
    labels[0] = 1;
    const double base = average_precision(scores, labels);
    std::vector<double> squashed;
    for (double s : scores) squashed.push_back(1.0 / (1.0 + std::exp(-7.0 * s)));
    CHECK(average_precision(squashed, labels) == base);
}

TEST_CASE("average precision matches the brute-force oracle with ties", "[eval]") {
    Rng rng(403);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.index(40));
        std::vector<double> scores;
        std::vector<int> labels;
        bool has_pos = false;
        for (int i = 0; i < n; ++i) {
            // quantized scores force frequent ties
            scores.push_back(rng.index(6) / 5.0);
            const int l = rng.uniform() < 0.4 ? 1 : 0;
            labels.push_back(l);
            has_pos = has_pos || l;
        }
        if (!has_pos) labels[0] = 1;
        CHECK(average_precision(scores, labels) == testsupport::brute_force_ap(scores, labels));
    }
}

TEST_CASE("ap is 1 iff positives strictly outrank negatives", "[eval]") {
    CHECK(average_precision(std::vector<double>{0.9, 0.7, 0.7},
                            std::vector<int>{1, 1, 0}) < 1.0);  // tie counts against
    CHECK(average_precision(std::vector<double>{0.9, 0.71, 0.7},
                            std::vector<int>{1, 1, 0}) == 1.0);
}

TEST_CASE("iou hand cases", "[eval]") {
    auto mask = [](int w, int h, std::vector<std::uint8_t> v) {
        BinaryMask b;
        b.width = w;
        b.height = h;
        b.values = std::move(v);
        return b;
    };
    const auto a = mask(2, 2, {1, 1, 0, 0});
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, mask(2, 2, {0, 0, 1, 1})) == 0.0);
    // |pred| = |truth| = 2, overlap 1 -> 1/3
    CHECK_THAT(iou(a, mask(2, 2, {0, 1, 1, 0})), Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-15));
    CHECK(iou(a, mask(2, 2, {0, 1, 1, 0})) == iou(mask(2, 2, {0, 1, 1, 0}), a));

    try {
        iou(mask(2, 2, {0, 0, 0, 0}), mask(2, 2, {0, 0, 0, 0}));
        FAIL("expected EmptyUnion");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyUnion);
    }
}

TEST_CASE("bsr percent error", "[eval]") {
    CHECK(bsr_percent_error(std::vector<double>{0.2, 0.4}, std::vector<double>{0.2, 0.4}) == 0.0);
    CHECK_THAT(bsr_percent_error(std::vector<double>{0.11}, std::vector<double>{0.10}),
               Catch::Matchers::WithinAbs(10.0, 1e-9));
    try {
        bsr_percent_error(std::vector<double>{0.1}, std::vector<double>{0.0});
        FAIL("expected ZeroTruth");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroTruth);
    }
    // explicit exclusion drops the undefined image
    CHECK_THAT(bsr_percent_error(std::vector<double>{0.11, 0.5}, std::vector<double>{0.10, 0.0},
                                 true),
               Catch::Matchers::WithinAbs(10.0, 1e-9));
}

namespace {

// well-separated synthetic score maps: positives near hi, negatives near lo
std::vector<ScoredMask> separable_scored(double lo, double hi) {
    std::vector<ScoredMask> scored;
    Rng rng(405);
    for (int k = 0; k < 3; ++k) {
        ScoredMask sm;
        sm.labels = LabelMask::filled(8, 8, PixelClass::SeedCoat);
        sm.scores = ScoreMap(8, 8, 2);
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) {
                const bool is_split = (x + y * 8 + k) % 5 == 0;
                if (is_split) sm.labels.at(x, y) = PixelClass::Split;
                if ((x == 7 && y == 7)) sm.labels.at(x, y) = PixelClass::Tray;
                const double p = is_split ? hi : lo;
                // store logits (0, logit(p)) so the softmax recovers p
                sm.scores.at(y, x)[1] = std::log(p / (1.0 - p));
            }
        }
        scored.push_back(std::move(sm));
    }
    return scored;
}

}  // namespace

TEST_CASE("calibration finds a separating threshold with IoU 1", "[eval]") {
    const auto scored = separable_scored(0.1, 0.9);
    const auto curve = calibrate_threshold(scored, CalibrationCriterion::IouMax);
    CHECK(curve.chosen_threshold > 0.1);
    CHECK(curve.chosen_threshold < 0.9);
    const std::size_t idx = static_cast<std::size_t>(std::lround(curve.chosen_threshold / 0.01));
    CHECK(curve.iou_values[idx] == 1.0);
    // ties resolve to the lowest threshold: nothing below can also reach 1
    for (std::size_t i = 0; i < idx; ++i) CHECK(curve.iou_values[i] < 1.0);

    // chosen threshold maximizes IoU over the whole grid
    for (double v : curve.iou_values) CHECK(v <= curve.iou_values[idx]);

    const auto bsr_curve = calibrate_threshold(scored, CalibrationCriterion::BsrErrorMin);
    CHECK(bsr_curve.bsr_error_pct[static_cast<std::size_t>(
              std::lround(bsr_curve.chosen_threshold / 0.01))] == 0.0);
}

TEST_CASE("monotone score transforms move the chosen threshold consistently", "[eval]") {
    const auto scored = separable_scored(0.1, 0.9);
    const auto base = calibrate_threshold(scored, CalibrationCriterion::IouMax);

    // squash probabilities through p -> p^2 (strictly increasing on [0,1])
    auto transformed = scored;
    for (auto& sm : transformed) {
        for (int y = 0; y < sm.scores.height; ++y) {
            for (int x = 0; x < sm.scores.width; ++x) {
                const double p = 1.0 / (1.0 + std::exp(-sm.scores.at(y, x)[1]));
                const double q = p * p;
                sm.scores.at(y, x)[1] = std::log(q / (1.0 - q));
            }
        }
    }
    const auto moved = calibrate_threshold(transformed, CalibrationCriterion::IouMax);
    const double expected = base.chosen_threshold * base.chosen_threshold;
    CHECK(std::abs(moved.chosen_threshold - expected) <= 0.01 + 1e-12);

    try {
        calibrate_threshold({}, CalibrationCriterion::IouMax);
        FAIL("expected EmptySet");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptySet);
    }
}

TEST_CASE("lda scores class 1 high on tight separated clusters", "[eval]") {
    Rng rng(407);
    std::vector<HsvPixel> features;
    std::vector<int> labels;
    for (int i = 0; i < 400; ++i) {
        const int l = i % 2;
        HsvPixel f;
        f.hue = (l ? 30.0 : 200.0) + rng.normal(0.0, 1.5);
        f.saturation = (l ? 0.8 : 0.3) + rng.normal(0.0, 0.01);
        f.value = (l ? 0.7 : 0.4) + rng.normal(0.0, 0.01);
        features.push_back(f);
        labels.push_back(l);
    }
    const auto model = lda_fit(features, labels);
    std::vector<double> scores;
    for (const auto& f : features) scores.push_back(lda_score(model, f));
    CHECK(average_precision(scores, labels) == 1.0);

    try {
        lda_fit({features[0], features[1]}, {1, 1});
        FAIL("expected SingleClass");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingleClass);
    }
}

TEST_CASE("lda weight direction for exactly spherical scatter", "[eval]") {
    // six symmetric points per class make the pooled covariance spherical,
    // so the fitted direction must parallel the mean difference
    std::vector<HsvPixel> features;
    std::vector<int> labels;
    const double d = 0.05;
    auto add_class = [&](std::array<double, 3> mu, int label) {
        for (int axis = 0; axis < 3; ++axis) {
            for (double sign : {-1.0, 1.0}) {
                std::array<double, 3> x = mu;
                x[axis] += sign * d;
                features.push_back({x[0], x[1], x[2]});
                labels.push_back(label);
            }
        }
    };
    add_class({100.0, 0.3, 0.4}, 0);
    add_class({140.0, 0.7, 0.6}, 1);
    const auto model = lda_fit(features, labels);

    const std::array<double, 3> diff = {40.0, 0.4, 0.2};
    double dot = 0.0, nw = 0.0, nd = 0.0;
    for (int i = 0; i < 3; ++i) {
        dot += model.weight[i] * diff[i];
        nw += model.weight[i] * model.weight[i];
        nd += diff[i] * diff[i];
    }
    const double cosine = dot / std::sqrt(nw * nd);
    CHECK(std::acos(std::min(1.0, cosine)) < 1e-6);
}

TEST_CASE("lda score is affine with zero at the class midpoint", "[eval]") {
    LdaModel m;
    m.weight = {0.5, -2.0, 1.0};
    m.bias = 0.25;
    const HsvPixel a{10.0, 0.5, 0.5}, b{20.0, 0.6, 0.1};
    const HsvPixel shifted_a{15.0, 0.7, 0.9}, shifted_b{25.0, 0.8, 0.5};
    // score(x+y) - score(x) does not depend on x
    CHECK_THAT(lda_score(m, shifted_a) - lda_score(m, a),
               Catch::Matchers::WithinAbs(lda_score(m, shifted_b) - lda_score(m, b), 1e-12));

    // a fitted model scores the midpoint of class means as zero
    std::vector<HsvPixel> features;
    std::vector<int> labels;
    Rng rng(409);
    for (int i = 0; i < 100; ++i) {
        const int l = i % 2;
        features.push_back({(l ? 50.0 : 70.0) + rng.normal(0.0, 2.0),
                            0.5 + rng.normal(0.0, 0.05), 0.5 + rng.normal(0.0, 0.05)});
        labels.push_back(l);
    }
    const auto fitted = lda_fit(features, labels);
    std::array<double, 3> mu0 = {0, 0, 0}, mu1 = {0, 0, 0};
    int n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        auto& mu = labels[i] ? mu1 : mu0;
        mu[0] += features[i].hue;
        mu[1] += features[i].saturation;
        mu[2] += features[i].value;
        (labels[i] ? n1 : n0) += 1;
    }
    const HsvPixel midpoint{(mu0[0] / n0 + mu1[0] / n1) / 2.0,
                            (mu0[1] / n0 + mu1[1] / n1) / 2.0,
                            (mu0[2] / n0 + mu1[2] / n1) / 2.0};
    CHECK_THAT(lda_score(fitted, midpoint), Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("lda fit is shift equivariant", "[eval]") {
    Rng rng(411);
    std::vector<HsvPixel> features;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        const int l = rng.uniform() < 0.5 ? 1 : 0;
        features.push_back({(l ? 40.0 : 60.0) + rng.normal(0.0, 3.0),
                            (l ? 0.2 : 0.4) + rng.normal(0.0, 0.05),
                            0.5 + rng.normal(0.0, 0.1)});
        labels.push_back(l);
    }
    labels[0] = 0;
    labels[1] = 1;
    const auto base = lda_fit(features, labels);
    auto shifted = features;
    for (auto& f : shifted) {
        f.hue += 5.0;
        f.saturation += 0.1;
        f.value += 0.2;
    }
    const auto moved = lda_fit(shifted, labels);
    for (int i = 0; i < 3; ++i) {
        CHECK_THAT(moved.weight[i], Catch::Matchers::WithinRel(base.weight[i], 1e-9));
    }
    CHECK(std::abs(moved.bias - base.bias) > 0.0);
}

TEST_CASE("metrics CSV mirrors the table layout", "[eval]") {
    MetricsReport r;
    r.method = "pyramid";
    r.ap = 0.82;
    r.iou = 0.58;
    r.bsr_error_pct = 9.6;
    r.bsh_error = 0.81;
    const std::string csv = metrics_to_csv({r});
    CHECK(csv.rfind("method,ap,iou,bsr_error_pct,bsh_error\n", 0) == 0);
    CHECK(csv.find("pyramid,0.82") != std::string::npos);
}
