#include <doctest.h>

#include <cmath>

#include "support/helpers.hpp"
#include "vseg/metrics.hpp"

using namespace vseg;
using vseg::testing::mann_whitney_auc;

namespace {

BinaryMask mask_of(int w, int h, std::initializer_list<int> ones) {
    BinaryMask m(w, h);
    for (int i : ones) m.data[std::size_t(i)] = 1;
    return m;
}

}  // namespace

TEST_CASE("perfect prediction scores 1 everywhere") {
    Rng rng(1);
    BinaryMask gt = vseg::testing::random_mask(10, 10, 0.3, rng);
    BinaryMetrics m = confusion(gt, gt);
    CHECK(m.sp == doctest::Approx(1.0));
    CHECK(m.se == doctest::Approx(1.0));
    CHECK(m.acc == doctest::Approx(1.0));
}

TEST_CASE("hand confusion case: TP=8 FN=2 TN=85 FP=5") {
    BinaryMask gt(10, 10), pred(10, 10);
    for (int i = 0; i < 10; ++i) gt.data[std::size_t(i)] = 1;       // 10 positives
    for (int i = 0; i < 8; ++i) pred.data[std::size_t(i)] = 1;     // 8 hit
    for (int i = 10; i < 15; ++i) pred.data[std::size_t(i)] = 1;   // 5 false alarms
    BinaryMetrics m = confusion(pred, gt);
    CHECK(m.counts.tp == 8);
    CHECK(m.counts.fn == 2);
    CHECK(m.counts.tn == 85);
    CHECK(m.counts.fp == 5);
    CHECK(m.se == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(m.sp == doctest::Approx(85.0 / 90.0).epsilon(1e-12));
    CHECK(m.acc == doctest::Approx(0.93).epsilon(1e-12));
}

TEST_CASE("all-background prediction has zero sensitivity") {
    BinaryMask gt = mask_of(5, 5, {3, 7});
    BinaryMask pred(5, 5);
    BinaryMetrics m = confusion(pred, gt);
    CHECK(m.se == doctest::Approx(0.0));
}

TEST_CASE("undefined ratios are NaN, not zero") {
    BinaryMask gt(4, 4);  // no positives anywhere
    BinaryMask pred(4, 4);
    BinaryMetrics m = confusion(pred, gt);
    CHECK(std::isnan(m.se));
    CHECK(m.sp == doctest::Approx(1.0));
}

TEST_CASE("FOV restricts the counted pixels") {
    BinaryMask gt = mask_of(4, 1, {0});
    BinaryMask pred = mask_of(4, 1, {0, 3});
    BinaryMask fov = mask_of(4, 1, {0, 1});
    BinaryMetrics m = confusion(pred, gt, &fov);
    CHECK(m.counts.total() == 2);
    CHECK(m.counts.tp == 1);
    CHECK(m.counts.fp == 0);  // the false alarm at index 3 is outside the FOV
}

TEST_CASE("confusion counts satisfy the marginal identities and permutation invariance") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        BinaryMask gt = vseg::testing::random_mask(12, 12, 0.4, rng);
        BinaryMask pred = vseg::testing::random_mask(12, 12, 0.4, rng);
        BinaryMetrics m = confusion(pred, gt);
        CHECK(m.counts.tp + m.counts.fn == gt.count());
        CHECK(m.counts.tn + m.counts.fp == gt.data.size() - gt.count());
    }
    BinaryMask a(3, 2), b(3, 2);
    a.data = {1, 0, 1, 0, 0, 1};
    b.data = {1, 1, 0, 0, 1, 0};
    BinaryMask a2(3, 2), b2(3, 2);
    a2.data = {0, 1, 1, 0, 0, 1};  // same multiset of (pred,gt) pairs, shuffled
    b2.data = {1, 0, 1, 0, 1, 0};
    BinaryMetrics m1 = confusion(a, b);
    BinaryMetrics m2 = confusion(a2, b2);
    CHECK(m1.counts.tp == m2.counts.tp);
    CHECK(m1.counts.fp == m2.counts.fp);
}

TEST_CASE("shape mismatches are rejected") {
    BinaryMask a(3, 3), b(4, 3);
    CHECK_THROWS_AS(confusion(a, b), ShapeError);
}

TEST_CASE("ROC: stated example gives AUC 0.75") {
    std::vector<float> scores = {0.1f, 0.4f, 0.35f, 0.8f};
    std::vector<std::uint8_t> labels = {0, 0, 1, 1};
    RocCurve c = roc_auc(scores, labels);
    CHECK(c.auc == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(c.points.front().fpr == 0.0);
    CHECK(c.points.front().tpr == 0.0);
    CHECK(c.points.back().fpr == 1.0);
    CHECK(c.points.back().tpr == 1.0);
}

TEST_CASE("ROC: perfect separation gives 1.0, all ties give 0.5") {
    std::vector<float> hi = {0.9f, 0.8f, 0.1f, 0.2f};
    std::vector<std::uint8_t> lab = {1, 1, 0, 0};
    CHECK(roc_auc(hi, lab).auc == doctest::Approx(1.0));

    std::vector<float> flat = {0.5f, 0.5f, 0.5f, 0.5f};
    CHECK(roc_auc(flat, lab).auc == doctest::Approx(0.5));
}

TEST_CASE("ROC rejects single-class label sets") {
    std::vector<float> s = {0.1f, 0.2f};
    CHECK_THROWS_AS(roc_auc(s, {1, 1}), ArgumentError);
    CHECK_THROWS_AS(roc_auc(s, {0, 0}), ArgumentError);
}

TEST_CASE("ROC curve is monotone and trapezoid AUC equals the pairwise oracle") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng.uniform_index(63);
        std::vector<float> scores(n);
        std::vector<std::uint8_t> labels(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            // quantized scores produce plenty of ties
            scores[i] = float(rng.uniform_index(8)) / 8.f;
            labels[i] = rng.bernoulli(0.5) ? 1 : 0;
            (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        RocCurve c = roc_auc(scores, labels);
        CHECK(std::abs(c.auc - mann_whitney_auc(scores, labels)) < 1e-9);
        for (std::size_t i = 1; i < c.points.size(); ++i) {
            CHECK(c.points[i].fpr >= c.points[i - 1].fpr);
            CHECK(c.points[i].tpr >= c.points[i - 1].tpr);
        }
        CHECK(c.auc >= 0.0);
        CHECK(c.auc <= 1.0);
    }
}

TEST_CASE("AUC symmetry and invariance under strictly increasing transforms") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 4 + rng.uniform_index(40);
        std::vector<float> scores(n);
        std::vector<std::uint8_t> labels(n);
        labels[0] = 1;
        labels[1] = 0;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = float(rng.uniform01());
            if (i > 1) labels[i] = rng.bernoulli(0.4) ? 1 : 0;
        }
        double auc = roc_auc(scores, labels).auc;

        std::vector<float> neg(n);
        std::vector<std::uint8_t> flip(n);
        for (std::size_t i = 0; i < n; ++i) neg[i] = -scores[i];
        CHECK(roc_auc(neg, labels).auc == doctest::Approx(1.0 - auc).epsilon(1e-9));

        std::vector<float> warped(n);
        for (std::size_t i = 0; i < n; ++i)
            warped[i] = std::exp(3.f * scores[i]) + 1.f;  // strictly increasing
        CHECK(roc_auc(warped, labels).auc == doctest::Approx(auc).epsilon(1e-9));
    }
}

TEST_CASE("stratified AUC: degenerate strata report NaN, others compute") {
    // class map with thick vessels only
    ClassMap gt(4, 4);
    gt.set(0, 0, 3);
    gt.set(1, 0, 3);
    ProbabilityMap p(4, 4, 5);
    p.vessel_classes = {3, 4};
    Rng rng(5);
    for (auto& v : p.p) v = float(rng.uniform01());
    StratifiedAuc s = stratified_auc(p, gt);
    CHECK(std::isnan(s.thin));
    CHECK_FALSE(std::isnan(s.all));
    CHECK_FALSE(std::isnan(s.thick));
}

TEST_CASE("thin pixels scoring above all negatives give thin AUC 1.0") {
    ClassMap gt(4, 4);
    gt.set(0, 0, 4);
    gt.set(1, 1, 4);
    gt.set(2, 2, 1);  // boundary class counts as negative
    ProbabilityMap p(4, 4, 5);
    p.vessel_classes = {3, 4};
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
            bool thin = gt.at(x, y) == 4;
            p.prob_ref(3, x, y) = 0.f;
            p.prob_ref(4, x, y) = thin ? 0.9f : 0.05f;
        }
    StratifiedAuc s = stratified_auc(p, gt);
    CHECK(s.thin == doctest::Approx(1.0));
    CHECK(s.all == doctest::Approx(1.0));
}

TEST_CASE("random stratified instances match the pairwise oracle per stratum") {
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        ClassMap gt(32, 32);
        for (auto& v : gt.data) v = std::uint8_t(rng.uniform_index(5));
        ProbabilityMap p(32, 32, 5);
        p.vessel_classes = {3, 4};
        for (auto& v : p.p) v = float(rng.uniform(0, 0.5));

        StratifiedAuc s = stratified_auc(p, gt);

        auto oracle = [&](int positive_class_a, int positive_class_b) {
            std::vector<float> sc;
            std::vector<std::uint8_t> lb;
            for (int y = 0; y < 32; ++y)
                for (int x = 0; x < 32; ++x) {
                    int c = gt.at(x, y);
                    bool pos = c == positive_class_a || c == positive_class_b;
                    bool vessel = c == 3 || c == 4;
                    if (pos) {
                        sc.push_back(p.vessel_score(x, y));
                        lb.push_back(1);
                    } else if (!vessel) {
                        sc.push_back(p.vessel_score(x, y));
                        lb.push_back(0);
                    }
                }
            return mann_whitney_auc(sc, lb);
        };
        CHECK(std::abs(s.all - oracle(3, 4)) < 1e-9);
        CHECK(std::abs(s.thick - oracle(3, 3)) < 1e-9);
        CHECK(std::abs(s.thin - oracle(4, 4)) < 1e-9);
    }
}
