#pragma once

#include "vseg/image.hpp"
#include "vseg/inference.hpp"

namespace vseg {

struct ConfusionCounts {
    std::size_t tp = 0, fn = 0, tn = 0, fp = 0;

    std::size_t total() const { return tp + fn + tn + fp; }
};

// Sp = TN/(TN+FP), Se = TP/(TP+FN), Acc = (TP+TN)/total.
// Zero denominators report NaN, never 0.
struct BinaryMetrics {
    ConfusionCounts counts;
    double sp = 0, se = 0, acc = 0;
};

BinaryMetrics confusion(const BinaryMask& pred, const BinaryMask& gt,
                        const BinaryMask* fov = nullptr);

struct RocPoint {
    double fpr = 0, tpr = 0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // (0,0) ... (1,1), both coordinates non-decreasing
    double auc = 0;
};

// Threshold sweep over the unique scores, trapezoidal area. Tie groups
// collapse to one operating point, which makes the area equal the
// Mann-Whitney statistic with half credit for ties.
RocCurve roc_auc(const std::vector<float>& scores, const std::vector<std::uint8_t>& labels);

// AUC of the vessel score against three positive sets: all vessels {3,4},
// thick only {3}, thin only {4}. Negatives are all non-vessel pixels in
// every variant. A stratum without positives reports NaN.
struct StratifiedAuc {
    double all = 0, thick = 0, thin = 0;
};

StratifiedAuc stratified_auc(const ProbabilityMap& p, const ClassMap& gt,
                             const BinaryMask* fov = nullptr);

}  // namespace vseg
