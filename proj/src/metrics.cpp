#include "vseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vseg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

BinaryMetrics confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* fov) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw ShapeError("confusion: prediction and ground truth differ in size");
    if (fov && (fov->width != gt.width || fov->height != gt.height))
        throw ShapeError("confusion: FOV mask differs in size");

    BinaryMetrics m;
    for (std::size_t i = 0; i < gt.data.size(); ++i) {
        if (fov && !fov->data[i]) continue;
        bool p = pred.data[i], g = gt.data[i];
        if (p && g)
            ++m.counts.tp;
        else if (!p && g)
            ++m.counts.fn;
        else if (!p && !g)
            ++m.counts.tn;
        else
            ++m.counts.fp;
    }
    const auto& c = m.counts;
    m.sp = (c.tn + c.fp) ? double(c.tn) / double(c.tn + c.fp) : kNaN;
    m.se = (c.tp + c.fn) ? double(c.tp) / double(c.tp + c.fn) : kNaN;
    m.acc = c.total() ? double(c.tp + c.tn) / double(c.total()) : kNaN;
    return m;
}

RocCurve roc_auc(const std::vector<float>& scores, const std::vector<std::uint8_t>& labels) {
    if (scores.size() != labels.size())
        throw ShapeError("roc_auc: scores and labels differ in length");
    std::size_t pos = 0;
    for (auto l : labels) pos += l ? 1 : 0;
    std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0)
        throw ArgumentError("roc_auc: need at least one positive and one negative label");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];  // descending
    });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    double auc = 0;
    std::size_t tp = 0, fp = 0;
    double prev_fpr = 0, prev_tpr = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        float s = scores[order[i]];
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == s) {  // tie group
            if (labels[order[j]])
                ++tp;
            else
                ++fp;
            ++j;
        }
        double tpr = double(tp) / double(pos);
        double fpr = double(fp) / double(neg);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        curve.points.push_back({fpr, tpr});
        prev_fpr = fpr;
        prev_tpr = tpr;
        i = j;
    }
    curve.auc = auc;
    return curve;
}

StratifiedAuc stratified_auc(const ProbabilityMap& p, const ClassMap& gt, const BinaryMask* fov) {
    if (p.width != gt.width || p.height != gt.height)
        throw ShapeError("stratified_auc: probability map and class map differ in size");
    if (fov && (fov->width != gt.width || fov->height != gt.height))
        throw ShapeError("stratified_auc: FOV mask differs in size");

    std::vector<float> scores;
    std::vector<std::uint8_t> cls;
    scores.reserve(gt.data.size());
    cls.reserve(gt.data.size());
    for (int y = 0; y < gt.height; ++y)
        for (int x = 0; x < gt.width; ++x) {
            if (fov && !fov->at(x, y)) continue;
            scores.push_back(p.vessel_score(x, y));
            cls.push_back(gt.at(x, y));
        }

    auto auc_for = [&](auto is_positive) -> double {
        std::vector<float> s;
        std::vector<std::uint8_t> l;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            bool vessel = cls[i] == 3 || cls[i] == 4;
            if (is_positive(cls[i])) {
                s.push_back(scores[i]);
                l.push_back(1);
            } else if (!vessel) {  // negatives: all non-vessel pixels
                s.push_back(scores[i]);
                l.push_back(0);
            }
        }
        bool any_pos = std::find(l.begin(), l.end(), 1) != l.end();
        bool any_neg = std::find(l.begin(), l.end(), 0) != l.end();
        if (!any_pos || !any_neg) return std::numeric_limits<double>::quiet_NaN();
        return roc_auc(s, l).auc;
    };

    StratifiedAuc out;
    out.all = auc_for([](std::uint8_t c) { return c == 3 || c == 4; });
    out.thick = auc_for([](std::uint8_t c) { return c == 3; });
    out.thin = auc_for([](std::uint8_t c) { return c == 4; });
    return out;
}

}  // namespace vseg
