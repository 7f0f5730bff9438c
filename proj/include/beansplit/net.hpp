#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "beansplit/error.hpp"
#include "beansplit/image.hpp"
#include "beansplit/rng.hpp"
#include "beansplit/tensor.hpp"

namespace beansplit {

enum class ModelKind { BeanVsTray, SplitVsSeedCoat };

inline const char* model_kind_name(ModelKind k) {
    return k == ModelKind::BeanVsTray ? "bean" : "split";
}

// Pyramid architecture description: 3x3 kernels throughout, max-pooling
// between resolutions, nearest-neighbor upsampling with a skip merge on the
// way back up. Per-level channel widths and conv counts are configuration.
struct NetworkConfig {
    int levels = 6;
    std::vector<int> channels = {16, 32, 64, 64, 64, 64};       // per level
    std::vector<int> encoder_convs = {2, 2, 2, 2, 2, 2};        // per level
    std::vector<int> decoder_convs = {1, 1, 1, 1, 1};           // per level 0..levels-2
    int classes = 2;
    std::array<double, 3> input_norm = {0.0, 0.0, 0.0};  // per-channel mean of [0,1] pixels

    int pool_multiple() const { return 1 << (levels - 1); }

    void validate() const {
        if (levels < 1) fail(ErrorCode::InvalidParameter, "levels must be >= 1");
        if (static_cast<int>(channels.size()) != levels ||
            static_cast<int>(encoder_convs.size()) != levels ||
            static_cast<int>(decoder_convs.size()) != levels - 1) {
            fail(ErrorCode::InvalidParameter, "per-level vectors must match levels");
        }
        for (int c : channels) {
            if (c < 1) fail(ErrorCode::InvalidParameter, "channel widths must be >= 1");
        }
        for (int n : encoder_convs) {
            if (n < 1) fail(ErrorCode::InvalidParameter, "encoder stages need >= 1 conv");
        }
        for (int n : decoder_convs) {
            if (n < 1) fail(ErrorCode::InvalidParameter, "decoder stages need >= 1 conv");
        }
        if (classes < 2) fail(ErrorCode::InvalidParameter, "classes must be >= 2");
    }
};

// One 3x3 convolution in the canonical parameter order. Kernel element
// (ky,kx,ci,co) lives at w_off + ((ky*3+kx)*cin + ci)*cout + co; the bias
// for co follows at b_off + co.
struct ConvShape {
    int cin = 0;
    int cout = 0;
    std::size_t w_off = 0;
    std::size_t b_off = 0;

    std::size_t kernel_size() const { return static_cast<std::size_t>(9) * cin * cout; }
};

// Canonical order: encoder stages level 0..L-1 (convs in forward order),
// then decoder stages level L-2 down to 0. This order is also the
// serialization order of the weight file. The network's very last conv is
// the logit layer: it outputs `classes` channels and takes no ReLU.
struct NetworkLayout {
    std::vector<ConvShape> convs;
    std::vector<std::vector<int>> encoder_stage;  // conv indices per level
    std::vector<std::vector<int>> decoder_stage;  // conv indices per level 0..L-2
    std::size_t param_count = 0;

    int logit_conv() const { return static_cast<int>(convs.size()) - 1; }
};

inline NetworkLayout make_layout(const NetworkConfig& cfg) {
    cfg.validate();
    NetworkLayout lay;
    std::size_t off = 0;
    auto add_conv = [&](int cin, int cout) {
        ConvShape s;
        s.cin = cin;
        s.cout = cout;
        s.w_off = off;
        off += s.kernel_size();
        s.b_off = off;
        off += static_cast<std::size_t>(cout);
        lay.convs.push_back(s);
        return static_cast<int>(lay.convs.size()) - 1;
    };

    lay.encoder_stage.resize(cfg.levels);
    for (int l = 0; l < cfg.levels; ++l) {
        int cin = (l == 0) ? 3 : cfg.channels[l - 1];
        for (int k = 0; k < cfg.encoder_convs[l]; ++k) {
            const bool is_logit = cfg.levels == 1 && k == cfg.encoder_convs[l] - 1;
            lay.encoder_stage[l].push_back(add_conv(cin, is_logit ? cfg.classes : cfg.channels[l]));
            cin = cfg.channels[l];
        }
    }
    lay.decoder_stage.resize(std::max(cfg.levels - 1, 0));
    int deep = cfg.channels[cfg.levels - 1];
    for (int l = cfg.levels - 2; l >= 0; --l) {
        int cin = cfg.channels[l] + deep;  // concat(skip, upsampled)
        for (int k = 0; k < cfg.decoder_convs[l]; ++k) {
            const bool is_logit = l == 0 && k == cfg.decoder_convs[l] - 1;
            lay.decoder_stage[l].push_back(add_conv(cin, is_logit ? cfg.classes : cfg.channels[l]));
            cin = cfg.channels[l];
        }
        deep = cfg.channels[l];
    }
    lay.param_count = off;
    return lay;
}

// 1 + sum over all 3x3 convolutions of 2 * effective stride, where the
// effective stride doubles at each pooled level. The default configuration
// evaluates to 315.
inline int receptive_field(const NetworkConfig& cfg) {
    cfg.validate();
    long rf = 1;
    for (int l = 0; l < cfg.levels; ++l) rf += 2L * cfg.encoder_convs[l] * (1L << l);
    for (int l = 0; l < cfg.levels - 1; ++l) rf += 2L * cfg.decoder_convs[l] * (1L << l);
    return static_cast<int>(rf);
}

struct NetworkWeights {
    NetworkConfig config;
    ModelKind kind = ModelKind::SplitVsSeedCoat;
    std::vector<double> params;  // canonical order, see NetworkLayout
};

// Zero-mean uniform init scaled by 1/sqrt(fan-in), fan-in = 9 * cin.
inline NetworkWeights init_weights(const NetworkConfig& cfg, ModelKind kind, Rng& rng) {
    const NetworkLayout lay = make_layout(cfg);
    NetworkWeights w;
    w.config = cfg;
    w.kind = kind;
    w.params.assign(lay.param_count, 0.0);
    for (const ConvShape& c : lay.convs) {
        const double bound = 1.0 / std::sqrt(9.0 * c.cin);
        for (std::size_t i = 0; i < c.kernel_size(); ++i) {
            w.params[c.w_off + i] = rng.uniform(-bound, bound);
        }
        // biases start at zero
    }
    return w;
}

// ---------------------------------------------------------------------------
// Layer primitives
// ---------------------------------------------------------------------------

// Zero-padded same-size 3x3 convolution.
inline Tensor conv3x3(const Tensor& in, std::span<const double> kernel,
                      std::span<const double> bias, int cout) {
    const int cin = in.channels;
    if (kernel.size() != static_cast<std::size_t>(9) * cin * cout) {
        fail(ErrorCode::ChannelMismatch, "kernel size does not match input channels");
    }
    if (bias.size() != static_cast<std::size_t>(cout)) {
        fail(ErrorCode::ChannelMismatch, "bias size does not match output channels");
    }
    Tensor out(in.height, in.width, cout);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double* o = out.at(y, x);
            for (int co = 0; co < cout; ++co) o[co] = bias[co];
            for (int ky = 0; ky < 3; ++ky) {
                const int sy = y + ky - 1;
                if (sy < 0 || sy >= in.height) continue;
                for (int kx = 0; kx < 3; ++kx) {
                    const int sx = x + kx - 1;
                    if (sx < 0 || sx >= in.width) continue;
                    const double* ip = in.at(sy, sx);
                    const double* kp = kernel.data() + static_cast<std::size_t>(ky * 3 + kx) * cin * cout;
                    for (int ci = 0; ci < cin; ++ci) {
                        const double v = ip[ci];
                        const double* krow = kp + static_cast<std::size_t>(ci) * cout;
                        for (int co = 0; co < cout; ++co) o[co] += v * krow[co];
                    }
                }
            }
        }
    }
    return out;
}

struct Conv3x3Grads {
    Tensor input;
    std::vector<double> kernel;
    std::vector<double> bias;
};

// Exact gradients w.r.t. input, kernel and bias given the output gradient.
inline Conv3x3Grads conv3x3_backward(const Tensor& in, std::span<const double> kernel, int cout,
                                     const Tensor& out_grad) {
    const int cin = in.channels;
    if (out_grad.height != in.height || out_grad.width != in.width || out_grad.channels != cout) {
        fail(ErrorCode::ShapeMismatch, "output gradient shape mismatch");
    }
    Conv3x3Grads g;
    g.input = Tensor(in.height, in.width, cin);
    g.kernel.assign(static_cast<std::size_t>(9) * cin * cout, 0.0);
    g.bias.assign(static_cast<std::size_t>(cout), 0.0);

    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            const double* og = out_grad.at(y, x);
            for (int co = 0; co < cout; ++co) g.bias[co] += og[co];
            for (int ky = 0; ky < 3; ++ky) {
                const int sy = y + ky - 1;
                if (sy < 0 || sy >= in.height) continue;
                for (int kx = 0; kx < 3; ++kx) {
                    const int sx = x + kx - 1;
                    if (sx < 0 || sx >= in.width) continue;
                    const double* ip = in.at(sy, sx);
                    double* igp = g.input.at(sy, sx);
                    const std::size_t base = static_cast<std::size_t>(ky * 3 + kx) * cin * cout;
                    const double* kp = kernel.data() + base;
                    double* kgp = g.kernel.data() + base;
                    for (int ci = 0; ci < cin; ++ci) {
                        const double v = ip[ci];
                        const double* krow = kp + static_cast<std::size_t>(ci) * cout;
                        double* kgrow = kgp + static_cast<std::size_t>(ci) * cout;
                        double acc = 0.0;
                        for (int co = 0; co < cout; ++co) {
                            acc += og[co] * krow[co];
                            kgrow[co] += v * og[co];
                        }
                        igp[ci] += acc;
                    }
                }
            }
        }
    }
    return g;
}

struct MaxPoolResult {
    Tensor output;
    std::vector<std::uint32_t> argmax;  // winning input offset per output element
};

// 2x2 max pooling with stride 2. Ties go to the first window position in
// scan order, which also receives the full gradient on the backward pass.
inline MaxPoolResult maxpool2(const Tensor& in) {
    if (in.height % 2 != 0 || in.width % 2 != 0) {
        fail(ErrorCode::OddDimensions, "maxpool2 requires even height and width");
    }
    MaxPoolResult r;
    r.output = Tensor(in.height / 2, in.width / 2, in.channels);
    r.argmax.resize(r.output.values.size());
    const int c = in.channels;
    for (int y = 0; y < r.output.height; ++y) {
        for (int x = 0; x < r.output.width; ++x) {
            double* o = r.output.at(y, x);
            std::uint32_t* am = &r.argmax[(static_cast<std::size_t>(y) * r.output.width + x) * c];
            for (int ch = 0; ch < c; ++ch) {
                double best = -1.0;
                std::uint32_t best_off = 0;
                bool first = true;
                for (int dy = 0; dy < 2; ++dy) {
                    for (int dx = 0; dx < 2; ++dx) {
                        const std::size_t off =
                            (static_cast<std::size_t>(2 * y + dy) * in.width + (2 * x + dx)) * c + ch;
                        const double v = in.values[off];
                        if (first || v > best) {
                            best = v;
                            best_off = static_cast<std::uint32_t>(off);
                            first = false;
                        }
                    }
                }
                o[ch] = best;
                am[ch] = best_off;
            }
        }
    }
    return r;
}

inline Tensor maxpool2_backward(const MaxPoolResult& fwd, const Tensor& out_grad, int in_h, int in_w) {
    Tensor g(in_h, in_w, out_grad.channels);
    for (std::size_t i = 0; i < out_grad.values.size(); ++i) {
        g.values[fwd.argmax[i]] += out_grad.values[i];
    }
    return g;
}

// Nearest-neighbor 2x upsampling: each pixel becomes a 2x2 block.
inline Tensor upsample_nn2(const Tensor& in) {
    Tensor out(in.height * 2, in.width * 2, in.channels);
    const int c = in.channels;
    for (int y = 0; y < out.height; ++y) {
        const double* src_row = in.at(y / 2, 0);
        double* dst = out.at(y, 0);
        for (int x = 0; x < out.width; ++x) {
            const double* src = src_row + static_cast<std::size_t>(x / 2) * c;
            for (int ch = 0; ch < c; ++ch) dst[ch] = src[ch];
            dst += c;
        }
    }
    return out;
}

// Each input element collects the gradients of the 4 output copies.
inline Tensor upsample_nn2_backward(const Tensor& out_grad) {
    Tensor g(out_grad.height / 2, out_grad.width / 2, out_grad.channels);
    const int c = out_grad.channels;
    for (int y = 0; y < out_grad.height; ++y) {
        for (int x = 0; x < out_grad.width; ++x) {
            const double* og = out_grad.at(y, x);
            double* ig = g.at(y / 2, x / 2);
            for (int ch = 0; ch < c; ++ch) ig[ch] += og[ch];
        }
    }
    return g;
}

inline void relu_inplace(Tensor& t) {
    for (double& v : t.values) v = v > 0.0 ? v : 0.0;
}

inline Tensor concat_channels(const Tensor& a, const Tensor& b) {
    if (a.height != b.height || a.width != b.width) {
        fail(ErrorCode::ShapeMismatch, "concat requires equal spatial dims");
    }
    Tensor out(a.height, a.width, a.channels + b.channels);
    for (std::size_t p = 0; p < out.pixel_count(); ++p) {
        double* o = &out.values[p * out.channels];
        const double* pa = &a.values[p * a.channels];
        const double* pb = &b.values[p * b.channels];
        for (int c = 0; c < a.channels; ++c) o[c] = pa[c];
        for (int c = 0; c < b.channels; ++c) o[a.channels + c] = pb[c];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pyramid forward / backward
// ---------------------------------------------------------------------------

namespace detail {

struct ConvTrace {
    Tensor input;
    std::vector<std::uint8_t> relu_gate;  // 1 where post-activation > 0; empty if no ReLU
};

struct PyramidTrace {
    std::vector<ConvTrace> convs;            // indexed like NetworkLayout::convs
    std::vector<MaxPoolResult> pools;        // per level 0..L-2
    std::vector<std::array<int, 2>> pool_in_dims;
    std::vector<Tensor> enc_out;             // per level, stage output before pooling
};

inline Tensor run_conv(const NetworkWeights& w, const NetworkLayout& lay, int idx,
                       const Tensor& in, bool relu, PyramidTrace* trace) {
    const ConvShape& s = lay.convs[idx];
    Tensor out = conv3x3(in, std::span(w.params).subspan(s.w_off, s.kernel_size()),
                         std::span(w.params).subspan(s.b_off, static_cast<std::size_t>(s.cout)),
                         s.cout);
    if (relu) relu_inplace(out);
    if (trace) {
        ConvTrace& t = trace->convs[idx];
        t.input = in;
        if (relu) {
            t.relu_gate.resize(out.values.size());
            for (std::size_t i = 0; i < out.values.size(); ++i) {
                t.relu_gate[i] = out.values[i] > 0.0 ? 1 : 0;
            }
        }
    }
    return out;
}

inline Tensor forward_tensor(const NetworkWeights& w, const NetworkLayout& lay, Tensor t,
                             PyramidTrace* trace) {
    const NetworkConfig& cfg = w.config;
    if (trace) {
        trace->convs.resize(lay.convs.size());
        trace->enc_out.resize(cfg.levels);
    }

    const int logit = lay.logit_conv();
    std::vector<Tensor> skips(cfg.levels);
    for (int l = 0; l < cfg.levels; ++l) {
        for (int idx : lay.encoder_stage[l]) {
            t = run_conv(w, lay, idx, t, idx != logit, trace);
        }
        if (trace) {
            trace->enc_out[l] = t;
        } else if (l < cfg.levels - 1) {
            skips[l] = t;
        }
        if (l < cfg.levels - 1) {
            const int in_h = t.height, in_w = t.width;
            MaxPoolResult pooled = maxpool2(t);
            t = std::move(pooled.output);
            if (trace) {
                trace->pool_in_dims.push_back({in_h, in_w});
                trace->pools.push_back(std::move(pooled));  // output already moved out
            }
        }
    }
    for (int l = cfg.levels - 2; l >= 0; --l) {
        Tensor up = upsample_nn2(t);
        t = concat_channels(trace ? trace->enc_out[l] : skips[l], up);
        for (int idx : lay.decoder_stage[l]) {
            t = run_conv(w, lay, idx, t, idx != logit, trace);
        }
    }
    return t;
}

// Mirrors forward_tensor in reverse; returns flat parameter gradients in
// canonical order. The gradient w.r.t. the network input is discarded.
inline std::vector<double> backward_tensor(const NetworkWeights& w, const NetworkLayout& lay,
                                           const PyramidTrace& trace, const Tensor& out_grad) {
    const NetworkConfig& cfg = w.config;
    std::vector<double> pgrad(lay.param_count, 0.0);

    auto conv_back = [&](int idx, Tensor grad) -> Tensor {
        const ConvShape& s = lay.convs[idx];
        const detail::ConvTrace& t = trace.convs[idx];
        if (!t.relu_gate.empty()) {
            for (std::size_t i = 0; i < grad.values.size(); ++i) {
                if (!t.relu_gate[i]) grad.values[i] = 0.0;
            }
        }
        Conv3x3Grads g = conv3x3_backward(
            t.input, std::span(w.params).subspan(s.w_off, s.kernel_size()), s.cout, grad);
        for (std::size_t i = 0; i < g.kernel.size(); ++i) pgrad[s.w_off + i] += g.kernel[i];
        for (std::size_t i = 0; i < g.bias.size(); ++i) pgrad[s.b_off + i] += g.bias[i];
        return std::move(g.input);
    };

    Tensor g = out_grad;

    // decoder stages ran for l = L-2 .. 0; walk them back in reverse
    std::vector<Tensor> skip_grad(cfg.levels);
    for (int l = 0; l <= cfg.levels - 2; ++l) {
        for (auto it = lay.decoder_stage[l].rbegin(); it != lay.decoder_stage[l].rend(); ++it) {
            g = conv_back(*it, std::move(g));
        }
        // split the concat(skip, upsampled) gradient
        const int skip_c = cfg.channels[l];
        const int up_c = g.channels - skip_c;
        Tensor gs(g.height, g.width, skip_c);
        Tensor gu(g.height, g.width, up_c);
        for (std::size_t p = 0; p < g.pixel_count(); ++p) {
            const double* gp = &g.values[p * g.channels];
            double* a = &gs.values[p * skip_c];
            double* b = &gu.values[p * up_c];
            for (int c = 0; c < skip_c; ++c) a[c] = gp[c];
            for (int c = 0; c < up_c; ++c) b[c] = gp[skip_c + c];
        }
        skip_grad[l] = std::move(gs);
        g = upsample_nn2_backward(gu);
    }

    // g now holds the gradient w.r.t. the deepest encoder output
    for (int l = cfg.levels - 1; l >= 0; --l) {
        if (l <= cfg.levels - 2) {
            for (std::size_t i = 0; i < g.values.size(); ++i) {
                g.values[i] += skip_grad[l].values[i];
            }
        }
        for (auto it = lay.encoder_stage[l].rbegin(); it != lay.encoder_stage[l].rend(); ++it) {
            g = conv_back(*it, std::move(g));
        }
        if (l > 0) {
            g = maxpool2_backward(trace.pools[l - 1], g,
                                  trace.pool_in_dims[l - 1][0], trace.pool_in_dims[l - 1][1]);
        }
    }
    return pgrad;
}

}  // namespace detail

// Pixels scaled to [0,1] minus the per-channel training-set mean.
inline Tensor image_to_tensor(const RgbImage& im, const std::array<double, 3>& input_norm) {
    Tensor t(im.height, im.width, 3);
    for (std::size_t i = 0; i < im.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            t.values[3 * i + c] = im.pixels[3 * i + c] / 255.0 - input_norm[c];
        }
    }
    return t;
}

// Full-resolution class logit map for an image whose dims divide 2^(levels-1).
inline ScoreMap pyramid_forward(const NetworkWeights& w, const RgbImage& image) {
    const int m = w.config.pool_multiple();
    if (image.width % m != 0 || image.height % m != 0) {
        fail(ErrorCode::DimensionNotDivisible,
             "image dims must be divisible by " + std::to_string(m) + "; use pad_to_multiple");
    }
    const NetworkLayout lay = make_layout(w.config);
    if (w.params.size() != lay.param_count) {
        fail(ErrorCode::ShapeMismatch, "parameter vector does not match config");
    }
    return detail::forward_tensor(w, lay, image_to_tensor(image, w.config.input_norm), nullptr);
}

inline Tensor softmax(const Tensor& logits) {
    Tensor p(logits.height, logits.width, logits.channels);
    const int c = logits.channels;
    for (std::size_t i = 0; i < logits.pixel_count(); ++i) {
        const double* l = &logits.values[i * c];
        double* o = &p.values[i * c];
        double mx = l[0];
        for (int k = 1; k < c; ++k) mx = std::max(mx, l[k]);
        double sum = 0.0;
        for (int k = 0; k < c; ++k) {
            o[k] = std::exp(l[k] - mx);
            sum += o[k];
        }
        for (int k = 0; k < c; ++k) o[k] /= sum;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Masked cross-entropy
// ---------------------------------------------------------------------------

// Per-pixel target channel indices; -1 marks ignored pixels. A pixel's
// channel is the rank of its class among the non-ignored classes in enum
// order (Tray, SeedCoat, Split).
inline std::vector<int> make_targets(const LabelMask& mask, const std::set<PixelClass>& ignore) {
    std::array<int, 3> rank = {-1, -1, -1};
    int next = 0;
    for (int c = 0; c < 3; ++c) {
        if (!ignore.count(static_cast<PixelClass>(c))) rank[c] = next++;
    }
    std::vector<int> targets(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        targets[i] = rank[static_cast<int>(mask.labels[i])];
    }
    return targets;
}

// Bean-vs-tray training collapses Split into SeedCoat.
inline LabelMask collapse_to_bean(LabelMask mask) {
    for (auto& c : mask.labels) {
        if (c == PixelClass::Split) c = PixelClass::SeedCoat;
    }
    return mask;
}

struct LossResult {
    double loss = 0.0;
    Tensor logit_grad;
};

// Mean softmax cross-entropy over non-ignored pixels; the gradient is zero
// at ignored pixels.
inline LossResult masked_cross_entropy(const Tensor& logits, const std::vector<int>& targets) {
    if (targets.size() != logits.pixel_count()) {
        fail(ErrorCode::ShapeMismatch, "target count does not match logit pixels");
    }
    const int c = logits.channels;
    std::size_t valid = 0;
    for (int t : targets) {
        if (t >= c) fail(ErrorCode::ChannelMismatch, "target class exceeds logit channels");
        if (t >= 0) ++valid;
    }
    if (valid == 0) fail(ErrorCode::EmptyLoss, "all pixels ignored");

    LossResult r;
    r.logit_grad = Tensor(logits.height, logits.width, c);
    const double inv_n = 1.0 / static_cast<double>(valid);
    double loss = 0.0;
    std::vector<double> p(c);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const int t = targets[i];
        if (t < 0) continue;
        const double* l = &logits.values[i * c];
        double mx = l[0];
        for (int k = 1; k < c; ++k) mx = std::max(mx, l[k]);
        double sum = 0.0;
        for (int k = 0; k < c; ++k) {
            p[k] = std::exp(l[k] - mx);
            sum += p[k];
        }
        loss -= (l[t] - mx - std::log(sum));
        double* g = &r.logit_grad.values[i * c];
        for (int k = 0; k < c; ++k) {
            g[k] = (p[k] / sum - (k == t ? 1.0 : 0.0)) * inv_n;
        }
    }
    r.loss = loss * inv_n;
    return r;
}

inline LossResult masked_cross_entropy(const ScoreMap& logits, const LabelMask& labels,
                                       const std::set<PixelClass>& ignore) {
    if (logits.height != labels.height || logits.width != labels.width) {
        fail(ErrorCode::ShapeMismatch, "logit and label dimensions differ");
    }
    return masked_cross_entropy(logits, make_targets(labels, ignore));
}

}  // namespace beansplit
