#include <catch2/catch_amalgamated.hpp>

#include "beansplit/net.hpp"
#include "beansplit/rng.hpp"
#include "beansplit/weights_io.hpp"

using namespace beansplit;

namespace {

NetworkConfig tiny_config(int levels, std::vector<int> channels) {
    NetworkConfig cfg;
    cfg.levels = levels;
    cfg.channels = std::move(channels);
    cfg.encoder_convs.assign(levels, 2);
    cfg.decoder_convs.assign(levels - 1, 1);
    return cfg;
}

Tensor random_tensor(Rng& rng, int h, int w, int c) {
    Tensor t(h, w, c);
    for (double& v : t.values) v = rng.uniform(-1.0, 1.0);
    return t;
}

}  // namespace

TEST_CASE("conv3x3 identity kernel preserves the input", "[net]") {
    Rng rng(7);
    const Tensor in = random_tensor(rng, 5, 4, 2);
    // center tap 1 on the matching channel, everything else 0
    std::vector<double> kernel(9 * 2 * 2, 0.0);
    for (int c = 0; c < 2; ++c) kernel[(static_cast<std::size_t>(4) * 2 + c) * 2 + c] = 1.0;
    std::vector<double> bias = {0.0, 0.0};
    const Tensor out = conv3x3(in, kernel, bias, 2);
    CHECK(out == in);
}

TEST_CASE("conv3x3 all-ones kernel counts the padded neighborhood", "[net]") {
    Tensor in(3, 3, 1);
    for (double& v : in.values) v = 2.0;  // constant c = 2
    std::vector<double> kernel(9, 1.0);
    std::vector<double> bias = {0.0};
    const Tensor out = conv3x3(in, kernel, bias, 1);
    CHECK(out.at(1, 1)[0] == 18.0);  // interior: 9c
    CHECK(out.at(0, 0)[0] == 8.0);   // corner: 4c
    CHECK(out.at(0, 1)[0] == 12.0);  // edge: 6c
}

TEST_CASE("conv3x3 rejects mismatched channels", "[net]") {
    Tensor in(2, 2, 3);
    std::vector<double> kernel(9 * 2 * 2, 0.0);
    std::vector<double> bias = {0.0, 0.0};
    try {
        conv3x3(in, kernel, bias, 2);
        FAIL("expected ChannelMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ChannelMismatch);
    }
}

TEST_CASE("maxpool2 takes window maxima, first-in-scan-order wins ties", "[net]") {
    Tensor in(2, 2, 1);
    in.values = {1.0, 2.0, 3.0, 4.0};
    const auto r = maxpool2(in);
    REQUIRE(r.output.values.size() == 1);
    CHECK(r.output.values[0] == 4.0);
    CHECK(r.argmax[0] == 3);

    Tensor tie(2, 2, 1);
    tie.values = {5.0, 5.0, 5.0, 5.0};
    CHECK(maxpool2(tie).argmax[0] == 0);

    Tensor odd(3, 2, 1);
    try {
        maxpool2(odd);
        FAIL("expected OddDimensions");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OddDimensions);
    }
}

TEST_CASE("maxpool2 of a constant field halves dimensions", "[net]") {
    Tensor in(6, 4, 3);
    for (double& v : in.values) v = 1.25;
    const auto r = maxpool2(in);
    CHECK(r.output.height == 3);
    CHECK(r.output.width == 2);
    for (double v : r.output.values) CHECK(v == 1.25);
}

TEST_CASE("upsample_nn2 replicates into 2x2 blocks", "[net]") {
    Tensor in(1, 1, 1);
    in.values = {5.0};
    const Tensor up = upsample_nn2(in);
    REQUIRE(up.height == 2);
    REQUIRE(up.width == 2);
    for (double v : up.values) CHECK(v == 5.0);

    Rng rng(3);
    const Tensor in2 = random_tensor(rng, 2, 2, 3);
    const Tensor up2 = upsample_nn2(in2);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            for (int c = 0; c < 3; ++c) CHECK(up2.at(y, x)[c] == in2.at(y / 2, x / 2)[c]);
        }
    }
}

TEST_CASE("maxpool2 of upsample_nn2 is the identity", "[net]") {
    Rng rng(11);
    const Tensor in = random_tensor(rng, 3, 5, 2);
    CHECK(maxpool2(upsample_nn2(in)).output == in);
}

TEST_CASE("upsample backward conserves the gradient sum", "[net]") {
    Rng rng(13);
    const Tensor og = random_tensor(rng, 6, 4, 2);
    const Tensor ig = upsample_nn2_backward(og);
    double so = 0.0, si = 0.0;
    for (double v : og.values) so += v;
    for (double v : ig.values) si += v;
    CHECK_THAT(si, Catch::Matchers::WithinRel(so, 1e-12));
}

TEST_CASE("receptive field accumulation", "[net]") {
    NetworkConfig one;
    one.levels = 1;
    one.channels = {4};
    one.encoder_convs = {1};
    one.decoder_convs = {};
    CHECK(receptive_field(one) == 3);  // single 3x3

    one.encoder_convs = {2};
    CHECK(receptive_field(one) == 5);  // two composed 3x3

    const NetworkConfig def;  // 6 levels, 2 encoder convs, 1 conv per decoder merge
    CHECK(receptive_field(def) == 315);
}

TEST_CASE("all-zero weights give uniform softmax", "[net]") {
    const NetworkConfig cfg = tiny_config(2, {4, 6});
    const NetworkLayout lay = make_layout(cfg);
    NetworkWeights w;
    w.config = cfg;
    w.kind = ModelKind::SplitVsSeedCoat;
    w.params.assign(lay.param_count, 0.0);

    const RgbImage im = RgbImage::filled(8, 6, 120, 40, 200);
    const ScoreMap logits = pyramid_forward(w, im);
    CHECK(logits.height == 6);
    CHECK(logits.width == 8);
    CHECK(logits.channels == 2);
    for (double v : logits.values) CHECK(v == 0.0);
    const Tensor p = softmax(logits);
    for (double v : p.values) CHECK_THAT(v, Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("pyramid output matches input dims with class channels", "[net]") {
    Rng rng(5);
    const NetworkConfig cfg = tiny_config(3, {4, 6, 8});
    NetworkWeights w = init_weights(cfg, ModelKind::BeanVsTray, rng);
    RgbImage im = RgbImage::filled(12, 8, 10, 20, 30);
    const ScoreMap out = pyramid_forward(w, im);
    CHECK(out.width == 12);
    CHECK(out.height == 8);
    CHECK(out.channels == 2);

    RgbImage bad = RgbImage::filled(10, 8, 0, 0, 0);  // 10 % 4 != 0
    try {
        pyramid_forward(w, bad);
        FAIL("expected DimensionNotDivisible");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionNotDivisible);
    }
}

TEST_CASE("softmax rows sum to one", "[net]") {
    Rng rng(17);
    const Tensor logits = random_tensor(rng, 4, 4, 3);
    const Tensor p = softmax(logits);
    for (std::size_t i = 0; i < p.pixel_count(); ++i) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c) s += p.values[i * 3 + c];
        CHECK_THAT(s, Catch::Matchers::WithinAbs(1.0, 1e-6));
    }
}

TEST_CASE("masked cross entropy at uniform logits is ln 2", "[net]") {
    Tensor logits(2, 2, 2);  // all zeros
    LabelMask labels = LabelMask::filled(2, 2, PixelClass::SeedCoat);
    labels.at(0, 0) = PixelClass::Split;
    const auto r = masked_cross_entropy(logits, labels, {PixelClass::Tray});
    CHECK_THAT(r.loss, Catch::Matchers::WithinRel(std::log(2.0), 1e-12));
}

TEST_CASE("ignored pixels do not affect loss or gradient", "[net]") {
    Rng rng(23);
    Tensor logits(3, 3, 2);
    for (double& v : logits.values) v = rng.uniform(-2.0, 2.0);
    LabelMask a = LabelMask::filled(3, 3, PixelClass::SeedCoat);
    a.at(0, 0) = PixelClass::Tray;
    a.at(2, 2) = PixelClass::Tray;
    a.at(1, 1) = PixelClass::Split;
    LabelMask b = a;
    b.at(0, 0) = PixelClass::Tray;  // same ignored set, labels unchanged elsewhere

    const auto ra = masked_cross_entropy(logits, a, {PixelClass::Tray});
    const auto rb = masked_cross_entropy(logits, b, {PixelClass::Tray});
    CHECK(ra.loss == rb.loss);
    CHECK(ra.logit_grad == rb.logit_grad);
    // gradient is exactly zero at the ignored pixels
    CHECK(ra.logit_grad.at(0, 0)[0] == 0.0);
    CHECK(ra.logit_grad.at(0, 0)[1] == 0.0);

    LabelMask all_tray = LabelMask::filled(3, 3, PixelClass::Tray);
    try {
        masked_cross_entropy(logits, all_tray, {PixelClass::Tray});
        FAIL("expected EmptyLoss");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyLoss);
    }
}

TEST_CASE("weight serialization roundtrips bit-exactly", "[net]") {
    Rng rng(29);
    const NetworkConfig cfg = tiny_config(2, {3, 5});
    NetworkWeights w = init_weights(cfg, ModelKind::SplitVsSeedCoat, rng);
    w.config.input_norm = {0.25, 0.5, 0.125};

    const auto bytes1 = serialize_weights(w);
    const NetworkWeights loaded = deserialize_weights(bytes1);
    CHECK(loaded.kind == w.kind);
    CHECK(loaded.config.levels == 2);
    CHECK(loaded.config.input_norm == w.config.input_norm);
    const auto bytes2 = serialize_weights(loaded);
    CHECK(bytes1 == bytes2);

    // the file records the computed receptive field next to the config
    const std::string text(bytes1.begin(), bytes1.end());
    CHECK(text.find("\"receptive_field\":" + std::to_string(receptive_field(w.config))) !=
          std::string::npos);
    CHECK(text.find("\"model_kind\":\"split\"") != std::string::npos);

    auto corrupt = bytes1;
    corrupt[0] = 'X';
    try {
        deserialize_weights(corrupt);
        FAIL("expected BadMagic");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadMagic);
    }

    auto truncated = bytes1;
    truncated.resize(truncated.size() - 3);
    try {
        deserialize_weights(truncated);
        FAIL("expected LengthMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LengthMismatch);
    }

    auto vbad = bytes1;
    vbad[4] = 9;
    try {
        deserialize_weights(vbad);
        FAIL("expected UnsupportedVersion");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedVersion);
    }
}
