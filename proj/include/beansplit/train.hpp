#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "beansplit/dataset.hpp"
#include "beansplit/error.hpp"
#include "beansplit/eval.hpp"
#include "beansplit/image.hpp"
#include "beansplit/io.hpp"
#include "beansplit/net.hpp"
#include "beansplit/rng.hpp"

namespace beansplit {

// AdaDelta accumulators, one per parameter.
struct OptimizerState {
    std::vector<double> avg_sq_grad;    // E[g^2]
    std::vector<double> avg_sq_update;  // E[dx^2]
    double rho = 0.95;
    double epsilon = 1e-6;

    static OptimizerState make(std::size_t n, double rho, double epsilon) {
        OptimizerState s;
        s.avg_sq_grad.assign(n, 0.0);
        s.avg_sq_update.assign(n, 0.0);
        s.rho = rho;
        s.epsilon = epsilon;
        return s;
    }
};

// E[g^2] <- rho E[g^2] + (1-rho) g^2
// dx     = -sqrt(E[dx^2]+eps) / sqrt(E[g^2]+eps) * g
// E[dx^2]<- rho E[dx^2] + (1-rho) dx^2
// p      <- p + dx
inline void adadelta_step(std::vector<double>& params, const std::vector<double>& grads,
                          OptimizerState& state) {
    if (params.size() != grads.size() || params.size() != state.avg_sq_grad.size()) {
        fail(ErrorCode::ShapeMismatch, "parameter/gradient/state sizes differ");
    }
    const double rho = state.rho, eps = state.epsilon;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.avg_sq_grad[i] = rho * state.avg_sq_grad[i] + (1.0 - rho) * g * g;
        const double dx = -std::sqrt(state.avg_sq_update[i] + eps) /
                          std::sqrt(state.avg_sq_grad[i] + eps) * g;
        state.avg_sq_update[i] = rho * state.avg_sq_update[i] + (1.0 - rho) * dx * dx;
        params[i] += dx;
    }
}

struct EpochStats {
    double loss = 0.0;    // mean step loss over the epoch
    double val_ap = 0.0;  // pooled average precision on the validation set
};

struct TrainingHistory {
    std::vector<EpochStats> epochs;

    std::string to_csv() const {
        std::string out = "epoch,loss,val_ap\n";
        char buf[128];
        for (std::size_t i = 0; i < epochs.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i + 1, epochs[i].loss,
                          epochs[i].val_ap);
            out += buf;
        }
        return out;
    }
};

struct TrainConfig {
    int epochs = 10;
    std::uint32_t seed = 1;
    double rho = 0.95;
    double epsilon = 1e-6;
    double threshold = 0.5;  // score threshold for the IoU progress readout
    bool verbose = false;
};

// In-memory training inputs: paired image/mask per sample.
struct LabeledSample {
    RgbImage image;
    LabelMask mask;
};

struct TrainingSet {
    std::vector<LabeledSample> train;
    std::vector<LabeledSample> val;
};

namespace detail {

// The split model ignores Tray; the bean model trains on collapsed
// two-class masks. Channel 1 is the positive class for both.
inline std::set<PixelClass> ignored_classes(ModelKind kind) {
    return kind == ModelKind::SplitVsSeedCoat ? std::set<PixelClass>{PixelClass::Tray}
                                              : std::set<PixelClass>{};
}

inline LabelMask task_mask(ModelKind kind, const LabelMask& mask) {
    return kind == ModelKind::BeanVsTray ? collapse_to_bean(mask) : mask;
}

inline std::array<double, 3> channel_means(const std::vector<LabeledSample>& samples) {
    std::array<double, 3> mean = {0.0, 0.0, 0.0};
    std::size_t n = 0;
    for (const auto& s : samples) {
        for (std::size_t i = 0; i < s.image.size(); ++i) {
            for (int c = 0; c < 3; ++c) mean[c] += s.image.pixels[3 * i + c] / 255.0;
        }
        n += s.image.size();
    }
    for (double& m : mean) m /= static_cast<double>(n);
    return mean;
}

struct PreparedSample {
    Tensor input;              // normalized, padded
    std::vector<int> targets;  // -1 at ignored pixels (incl. padding for the split task)
};

inline PreparedSample prepare(ModelKind kind, const LabeledSample& s,
                              const NetworkConfig& cfg) {
    const int m = cfg.pool_multiple();
    auto [img, off] = pad_to_multiple(s.image, m);
    auto [msk, moff] = pad_to_multiple(task_mask(kind, s.mask), m);
    (void)off;
    (void)moff;
    PreparedSample p;
    p.input = image_to_tensor(img, cfg.input_norm);
    p.targets = make_targets(msk, ignored_classes(kind));
    return p;
}

}  // namespace detail

struct PooledScores {
    std::vector<double> scores;  // positive-class probability per kept pixel
    std::vector<int> labels;     // 1 = positive class
};

// Pooled validation scores for the positive class (channel 1) against the
// binary ground truth, Tray excluded exactly as the loss excludes it.
inline PooledScores validation_scores(const NetworkWeights& w,
                                      const std::vector<LabeledSample>& val) {
    PooledScores out;
    const auto ignore = detail::ignored_classes(w.kind);
    const PixelClass positive =
        w.kind == ModelKind::SplitVsSeedCoat ? PixelClass::Split : PixelClass::SeedCoat;
    for (const auto& s : val) {
        const int m = w.config.pool_multiple();
        auto [img, off] = pad_to_multiple(s.image, m);
        const ScoreMap logits = pyramid_forward(w, img);
        const Tensor prob = softmax(logits);
        const LabelMask task = detail::task_mask(w.kind, s.mask);
        for (int y = 0; y < s.mask.height; ++y) {
            for (int x = 0; x < s.mask.width; ++x) {
                const PixelClass c = task.at(x, y);
                if (ignore.count(c)) continue;
                out.scores.push_back(prob.at(y + off.top, x + off.left)[1]);
                out.labels.push_back(c == positive ? 1 : 0);
            }
        }
    }
    return out;
}

inline double validation_ap(const NetworkWeights& w, const std::vector<LabeledSample>& val) {
    const PooledScores vs = validation_scores(w, val);
    return average_precision(vs.scores, vs.labels);
}

struct TrainResult {
    NetworkWeights weights;
    TrainingHistory history;
};

// Epochs of full passes over the dihedrally augmented train set, one image
// per AdaDelta step, deterministic for a fixed seed.
inline TrainResult train_model(ModelKind kind, const TrainingSet& data, NetworkConfig config,
                               const TrainConfig& tcfg) {
    if (data.train.empty()) fail(ErrorCode::EmptyPartition, "train partition is empty");
    config.input_norm = detail::channel_means(data.train);
    config.validate();

    Rng rng(tcfg.seed);
    NetworkWeights weights = init_weights(config, kind, rng);
    const NetworkLayout lay = make_layout(config);
    OptimizerState opt = OptimizerState::make(lay.param_count, tcfg.rho, tcfg.epsilon);

    // (sample, dihedral variant) pairs; reshuffled every epoch
    std::vector<std::pair<int, int>> steps;
    for (int i = 0; i < static_cast<int>(data.train.size()); ++i) {
        for (int v = 0; v < 8; ++v) steps.emplace_back(i, v);
    }

    TrainResult result;
    for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
        rng.shuffle(steps);
        double loss_sum = 0.0;
        for (const auto& [si, variant] : steps) {
            const LabeledSample& s = data.train[si];
            LabeledSample aug;
            aug.image = dihedral_transform(s.image, variant);
            aug.mask = dihedral_transform(s.mask, variant);
            const detail::PreparedSample ps = detail::prepare(kind, aug, config);

            detail::PyramidTrace trace;
            const Tensor logits =
                detail::forward_tensor(weights, lay, ps.input, &trace);
            const LossResult lr = masked_cross_entropy(logits, ps.targets);
            if (!std::isfinite(lr.loss)) {
                fail(ErrorCode::NonFiniteLoss, "training diverged at epoch " +
                                                   std::to_string(epoch + 1));
            }
            loss_sum += lr.loss;
            const std::vector<double> grads =
                detail::backward_tensor(weights, lay, trace, lr.logit_grad);
            adadelta_step(weights.params, grads, opt);
        }
        EpochStats es;
        es.loss = loss_sum / static_cast<double>(steps.size());
        double val_iou = 0.0;
        if (!data.val.empty()) {
            const PooledScores vs = validation_scores(weights, data.val);
            es.val_ap = average_precision(vs.scores, vs.labels);
            if (tcfg.verbose) {
                std::size_t tp = 0, fp = 0, fn = 0;
                for (std::size_t i = 0; i < vs.scores.size(); ++i) {
                    const bool pred = vs.scores[i] >= tcfg.threshold;
                    if (pred && vs.labels[i]) ++tp;
                    else if (pred) ++fp;
                    else if (vs.labels[i]) ++fn;
                }
                val_iou = (tp + fp + fn) ? static_cast<double>(tp) / (tp + fp + fn) : 0.0;
            }
        }
        result.history.epochs.push_back(es);
        if (tcfg.verbose) {
            std::fprintf(stderr, "epoch %d/%d  loss %.6f  val_ap %.4f  val_iou@%.2f %.4f\n",
                         epoch + 1, tcfg.epochs, es.loss, es.val_ap, tcfg.threshold, val_iou);
        }
    }
    result.weights = std::move(weights);
    return result;
}

// Manifest-driven variant: loads PPM/PGM pairs relative to base_dir.
inline TrainingSet load_training_set(const DatasetManifest& manifest,
                                     const std::filesystem::path& base_dir) {
    TrainingSet set;
    for (const auto& rec : manifest.records) {
        if (rec.partition == Partition::Score) continue;
        LabeledSample s;
        s.image = decode_ppm(read_file(base_dir / rec.image_path));
        s.mask = decode_pgm(read_file(base_dir / rec.label_path));
        if (s.image.width != s.mask.width || s.image.height != s.mask.height) {
            fail(ErrorCode::DimensionMismatch, "image/label dims differ for " + rec.image_path);
        }
        (rec.partition == Partition::Train ? set.train : set.val).push_back(std::move(s));
    }
    return set;
}

inline TrainResult train_model(ModelKind kind, const DatasetManifest& manifest,
                               const std::filesystem::path& base_dir, NetworkConfig config,
                               const TrainConfig& tcfg) {
    return train_model(kind, load_training_set(manifest, base_dir), std::move(config), tcfg);
}

}  // namespace beansplit
