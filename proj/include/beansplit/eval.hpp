#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "beansplit/error.hpp"
#include "beansplit/image.hpp"
#include "beansplit/measures.hpp"
#include "beansplit/net.hpp"

namespace beansplit {

// Mean precision at the rank of each positive item, sorted by descending
// score. Equal scores form a group evaluated at the group's end, so ties
// are scored pessimistically and the result is deterministic.
inline double average_precision(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        fail(ErrorCode::ShapeMismatch, "score/label lengths differ");
    }
    std::size_t total_pos = 0;
    for (int l : labels) total_pos += l ? 1 : 0;
    if (total_pos == 0) fail(ErrorCode::NoPositives, "no positive labels");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    double sum = 0.0;
    std::size_t rank = 0, tp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::size_t group_pos = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            group_pos += labels[order[j]] ? 1 : 0;
            ++j;
        }
        rank += j - i;
        tp += group_pos;
        const double precision = static_cast<double>(tp) / static_cast<double>(rank);
        for (std::size_t k = 0; k < group_pos; ++k) sum += precision;
        i = j;
    }
    return sum / static_cast<double>(total_pos);
}

inline double iou(const BinaryMask& pred, const BinaryMask& truth) {
    if (pred.width != truth.width || pred.height != truth.height) {
        fail(ErrorCode::ShapeMismatch, "mask dimensions differ");
    }
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
        const bool p = pred.values[i], t = truth.values[i];
        inter += (p && t) ? 1 : 0;
        uni += (p || t) ? 1 : 0;
    }
    if (uni == 0) fail(ErrorCode::EmptyUnion, "both masks are empty");
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// Mean over images of 100*|pred-truth|/truth. A zero truth BSR leaves the
// percent error undefined; such images are rejected unless the caller
// explicitly asks to drop them.
inline double bsr_percent_error(std::span<const double> pred, std::span<const double> truth,
                                bool exclude_zero_truth = false) {
    if (pred.size() != truth.size()) {
        fail(ErrorCode::LengthMismatch, "prediction/truth lengths differ");
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i] <= 0.0) {
            if (exclude_zero_truth) continue;
            fail(ErrorCode::ZeroTruth, "truth BSR of image " + std::to_string(i) + " is zero");
        }
        sum += 100.0 * std::abs(pred[i] - truth[i]) / truth[i];
        ++n;
    }
    if (n == 0) fail(ErrorCode::ZeroTruth, "no image has nonzero truth BSR");
    return sum / static_cast<double>(n);
}

// Accuracy report for one method on an evaluation set.
struct MetricsReport {
    std::string method;
    double ap = 0.0;
    double iou = 0.0;
    double bsr_error_pct = 0.0;
    double bsh_error = 0.0;
};

inline std::string metrics_to_csv(const std::vector<MetricsReport>& reports) {
    std::string out = "method,ap,iou,bsr_error_pct,bsh_error\n";
    char buf[256];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f\n", r.method.c_str(), r.ap,
                      r.iou, r.bsr_error_pct, r.bsh_error);
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Threshold calibration
// ---------------------------------------------------------------------------

enum class CalibrationCriterion { IouMax, BsrErrorMin };

struct CalibrationCurve {
    std::vector<double> thresholds;     // ascending grid over [0,1]
    std::vector<double> iou_values;     // pooled IoU per threshold
    std::vector<double> bsr_error_pct;  // mean BSR percent error per threshold
    double chosen_threshold = 0.0;
    CalibrationCriterion criterion = CalibrationCriterion::IouMax;

    std::string to_csv() const {
        std::string out = "threshold,iou,bsr_error_pct\n";
        char buf[128];
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.9f,%.9f\n", thresholds[i], iou_values[i],
                          bsr_error_pct[i]);
            out += buf;
        }
        return out;
    }
};

// One scored validation image: the split model's output and its label mask.
struct ScoredMask {
    ScoreMap scores;  // logits or probabilities; softmaxed internally
    LabelMask labels;
};

// Sweeps the threshold grid over the split-class softmax probability,
// pooling IoU across images and averaging BSR error per image. Ground-truth
// Tray pixels are excluded throughout. Images whose truth BSR is zero are
// dropped from the BSR-error criterion. Criterion ties pick the lowest
// threshold.
inline CalibrationCurve calibrate_threshold(const std::vector<ScoredMask>& scored,
                                            CalibrationCriterion criterion,
                                            double grid_step = 0.01) {
    if (scored.empty()) fail(ErrorCode::EmptySet, "no scored images");
    if (grid_step <= 0.0 || grid_step > 1.0) {
        fail(ErrorCode::InvalidParameter, "grid step must be in (0,1]");
    }

    // flatten each image once: split probability + binary truth per bean pixel
    struct FlatImage {
        std::vector<double> prob;
        std::vector<std::uint8_t> truth;
        std::size_t truth_split = 0;
    };
    std::vector<FlatImage> flats;
    for (const auto& sm : scored) {
        if (sm.scores.height != sm.labels.height || sm.scores.width != sm.labels.width) {
            fail(ErrorCode::ShapeMismatch, "score map and mask dims differ");
        }
        const Tensor prob = softmax(sm.scores);
        FlatImage f;
        for (int y = 0; y < sm.labels.height; ++y) {
            for (int x = 0; x < sm.labels.width; ++x) {
                const PixelClass c = sm.labels.at(x, y);
                if (c == PixelClass::Tray) continue;
                f.prob.push_back(prob.at(y, x)[1]);
                const bool is_split = c == PixelClass::Split;
                f.truth.push_back(is_split);
                f.truth_split += is_split ? 1 : 0;
            }
        }
        flats.push_back(std::move(f));
    }

    CalibrationCurve curve;
    curve.criterion = criterion;
    const int steps = static_cast<int>(std::lround(1.0 / grid_step));
    for (int s = 0; s <= steps; ++s) {
        const double th = static_cast<double>(s) * grid_step;
        std::size_t tp = 0, fp = 0, fn = 0;
        std::vector<double> pred_bsr, truth_bsr;
        for (const auto& f : flats) {
            std::size_t pred_split = 0;
            for (std::size_t i = 0; i < f.prob.size(); ++i) {
                const bool p = f.prob[i] >= th;
                pred_split += p ? 1 : 0;
                if (p && f.truth[i]) ++tp;
                else if (p) ++fp;
                else if (f.truth[i]) ++fn;
            }
            if (f.truth_split > 0 && !f.prob.empty()) {
                pred_bsr.push_back(static_cast<double>(pred_split) / f.prob.size());
                truth_bsr.push_back(static_cast<double>(f.truth_split) / f.prob.size());
            }
        }
        curve.thresholds.push_back(th);
        curve.iou_values.push_back((tp + fp + fn) ? static_cast<double>(tp) / (tp + fp + fn) : 0.0);
        curve.bsr_error_pct.push_back(
            truth_bsr.empty() ? std::numeric_limits<double>::infinity()
                              : bsr_percent_error(pred_bsr, truth_bsr));
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.thresholds.size(); ++i) {
        if (criterion == CalibrationCriterion::IouMax) {
            if (curve.iou_values[i] > curve.iou_values[best]) best = i;
        } else {
            if (curve.bsr_error_pct[i] < curve.bsr_error_pct[best]) best = i;
        }
    }
    curve.chosen_threshold = curve.thresholds[best];
    return curve;
}

// Accuracy metrics for split scores against labeled masks. AP pools all
// ground-truth bean pixels; IoU is pooled at the given threshold; BSR error
// and the BSH earth-mover error are averaged per image inside the
// ground-truth bean region. Images with zero truth BSR are excluded from
// the BSR-error mean.
inline MetricsReport evaluate_split_scores(const std::vector<ScoredMask>& scored,
                                           double threshold, std::size_t max_split_area,
                                           int bin_count, int connectivity) {
    if (scored.empty()) fail(ErrorCode::EmptySet, "no scored images");
    std::vector<double> ap_scores;
    std::vector<int> ap_labels;
    std::size_t tp = 0, fp = 0, fn = 0;
    std::vector<double> pred_bsr, truth_bsr;
    double emd_sum = 0.0;

    for (const auto& sm : scored) {
        if (sm.scores.height != sm.labels.height || sm.scores.width != sm.labels.width) {
            fail(ErrorCode::ShapeMismatch, "score map and mask dims differ");
        }
        const Tensor prob = softmax(sm.scores);
        BinaryMask pred{sm.labels.width, sm.labels.height,
                        std::vector<std::uint8_t>(sm.labels.size(), 0)};
        BinaryMask truth{sm.labels.width, sm.labels.height,
                         std::vector<std::uint8_t>(sm.labels.size(), 0)};
        std::size_t bean_px = 0, pred_split = 0, true_split = 0;
        for (int y = 0; y < sm.labels.height; ++y) {
            for (int x = 0; x < sm.labels.width; ++x) {
                const PixelClass c = sm.labels.at(x, y);
                if (c == PixelClass::Tray) continue;
                ++bean_px;
                const double p = prob.at(y, x)[1];
                ap_scores.push_back(p);
                ap_labels.push_back(c == PixelClass::Split ? 1 : 0);
                const std::size_t idx = static_cast<std::size_t>(y) * sm.labels.width + x;
                if (p >= threshold) {
                    pred.values[idx] = 1;
                    ++pred_split;
                    if (c == PixelClass::Split) ++tp;
                    else ++fp;
                } else if (c == PixelClass::Split) {
                    ++fn;
                }
                if (c == PixelClass::Split) {
                    truth.values[idx] = 1;
                    ++true_split;
                }
            }
        }
        if (bean_px == 0) fail(ErrorCode::NoBeanPixels, "an image has no bean pixels");
        if (true_split > 0) {
            pred_bsr.push_back(static_cast<double>(pred_split) / bean_px);
            truth_bsr.push_back(static_cast<double>(true_split) / bean_px);
        }

        auto areas_of = [&](const BinaryMask& m) {
            std::vector<std::size_t> areas;
            for (const auto& c : connected_components(m, connectivity)) areas.push_back(c.area);
            return areas;
        };
        emd_sum += emd_1d(bsh(areas_of(pred), bean_px, max_split_area, bin_count),
                          bsh(areas_of(truth), bean_px, max_split_area, bin_count));
    }

    MetricsReport r;
    r.ap = average_precision(ap_scores, ap_labels);
    r.iou = (tp + fp + fn) ? static_cast<double>(tp) / (tp + fp + fn) : 0.0;
    r.bsr_error_pct = pred_bsr.empty() ? 0.0 : bsr_percent_error(pred_bsr, truth_bsr);
    r.bsh_error = emd_sum / static_cast<double>(scored.size());
    return r;
}

// ---------------------------------------------------------------------------
// LDA baseline on HSV features
// ---------------------------------------------------------------------------

struct LdaModel {
    std::array<double, 3> weight = {0.0, 0.0, 0.0};
    double bias = 0.0;  // zero at the midpoint of projected class means
};

inline double lda_score(const LdaModel& m, const HsvPixel& f) {
    return m.weight[0] * f.hue + m.weight[1] * f.saturation + m.weight[2] * f.value + m.bias;
}

namespace detail {

// 3x3 solve by Gaussian elimination with partial pivoting.
inline std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a,
                                    std::array<double, 3> b) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

}  // namespace detail

// Fisher direction (pooled within-class covariance + ridge)^-1 (mu1 - mu0),
// class 1 scoring high. The ridge lambda = 1e-6 * trace/3 guards against
// degenerate HSV covariance (e.g. zero-saturation regions).
inline LdaModel lda_fit(const std::vector<HsvPixel>& features, const std::vector<int>& labels) {
    if (features.size() != labels.size()) {
        fail(ErrorCode::ShapeMismatch, "feature/label lengths differ");
    }
    std::array<double, 3> mu0 = {0, 0, 0}, mu1 = {0, 0, 0};
    std::size_t n0 = 0, n1 = 0;
    auto coords = [](const HsvPixel& f) {
        return std::array<double, 3>{f.hue, f.saturation, f.value};
    };
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto x = coords(features[i]);
        auto& mu = labels[i] ? mu1 : mu0;
        for (int d = 0; d < 3; ++d) mu[d] += x[d];
        (labels[i] ? n1 : n0) += 1;
    }
    if (n0 == 0 || n1 == 0) fail(ErrorCode::SingleClass, "both classes must be present");
    for (int d = 0; d < 3; ++d) {
        mu0[d] /= static_cast<double>(n0);
        mu1[d] /= static_cast<double>(n1);
    }

    std::array<std::array<double, 3>, 3> cov{};
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto x = coords(features[i]);
        const auto& mu = labels[i] ? mu1 : mu0;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) cov[r][c] += (x[r] - mu[r]) * (x[c] - mu[c]);
        }
    }
    const double denom = static_cast<double>(features.size() >= 3 ? features.size() - 2 : 1);
    for (auto& row : cov) {
        for (double& v : row) v /= denom;
    }
    const double lambda = 1e-6 * (cov[0][0] + cov[1][1] + cov[2][2]) / 3.0;
    for (int d = 0; d < 3; ++d) cov[d][d] += lambda;

    LdaModel m;
    m.weight = detail::solve3(cov, {mu1[0] - mu0[0], mu1[1] - mu0[1], mu1[2] - mu0[2]});
    double mid = 0.0;
    for (int d = 0; d < 3; ++d) mid += m.weight[d] * (mu0[d] + mu1[d]) / 2.0;
    m.bias = -mid;
    return m;
}

}  // namespace beansplit
