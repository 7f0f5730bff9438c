// Command-line front end for the bean split pipeline: train the two
// segmentation models, calibrate the split threshold, segment and measure
// images, evaluate against labeled data, and run the study statistics.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beansplit/dataset.hpp"
#include "beansplit/eval.hpp"
#include "beansplit/image.hpp"
#include "beansplit/io.hpp"
#include "beansplit/measures.hpp"
#include "beansplit/net.hpp"
#include "beansplit/pipeline.hpp"
#include "beansplit/stats.hpp"
#include "beansplit/svg.hpp"
#include "beansplit/train.hpp"
#include "beansplit/weights_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

beansplit::DatasetManifest load_manifest_file(const fs::path& path) {
    return beansplit::load_manifest(beansplit::read_text_file(path));
}

beansplit::NetworkConfig load_net_config_file(const fs::path& path) {
    try {
        return beansplit::net_config_from_json(json::parse(beansplit::read_text_file(path)));
    } catch (const json::exception& e) {
        beansplit::fail(beansplit::ErrorCode::MalformedHeader,
                        "bad net config JSON: " + std::string(e.what()));
    }
}

beansplit::TrainConfig load_train_config_file(const fs::path& path) {
    json j;
    try {
        j = json::parse(beansplit::read_text_file(path));
    } catch (const json::exception& e) {
        beansplit::fail(beansplit::ErrorCode::MalformedHeader,
                        "bad train config JSON: " + std::string(e.what()));
    }
    beansplit::TrainConfig t;
    t.epochs = j.value("epochs", t.epochs);
    t.seed = j.value("seed", t.seed);
    t.rho = j.value("rho", t.rho);
    t.epsilon = j.value("epsilon", t.epsilon);
    t.threshold = j.value("threshold", t.threshold);
    return t;
}

fs::path with_extension(fs::path p, const char* ext) {
    p.replace_extension(ext);
    return p;
}

// Split-model score maps paired with ground-truth masks for one partition.
std::vector<beansplit::ScoredMask> score_partition(const beansplit::NetworkWeights& split_model,
                                                   const beansplit::DatasetManifest& manifest,
                                                   const fs::path& base,
                                                   beansplit::Partition part) {
    std::vector<beansplit::ScoredMask> scored;
    for (const auto* rec : manifest.partition(part)) {
        beansplit::ScoredMask sm;
        const auto image = beansplit::decode_ppm(beansplit::read_file(base / rec->image_path));
        sm.labels = beansplit::decode_pgm(beansplit::read_file(base / rec->label_path));
        const int m = split_model.config.pool_multiple();
        auto [padded, off] = beansplit::pad_to_multiple(image, m);
        const beansplit::ScoreMap full = beansplit::pyramid_forward(split_model, padded);
        beansplit::ScoreMap cropped(sm.labels.height, sm.labels.width, full.channels);
        for (int y = 0; y < sm.labels.height; ++y) {
            for (int x = 0; x < sm.labels.width; ++x) {
                const double* src = full.at(y + off.top, x + off.left);
                double* dst = cropped.at(y, x);
                for (int c = 0; c < full.channels; ++c) dst[c] = src[c];
            }
        }
        sm.scores = std::move(cropped);
        scored.push_back(std::move(sm));
    }
    return scored;
}

std::vector<beansplit::LabelMask> partition_masks(const beansplit::DatasetManifest& manifest,
                                                  const fs::path& base,
                                                  beansplit::Partition part) {
    std::vector<beansplit::LabelMask> masks;
    for (const auto* rec : manifest.partition(part)) {
        masks.push_back(beansplit::decode_pgm(beansplit::read_file(base / rec->label_path)));
    }
    return masks;
}

// ---------------------------------------------------------------------------

int cmd_train(const fs::path& manifest_path, const std::string& model,
              const fs::path& net_config_path, const fs::path& train_config_path,
              const fs::path& out_path, const fs::path& history_path, bool quiet) {
    const auto manifest = load_manifest_file(manifest_path);
    const auto net_cfg = load_net_config_file(net_config_path);
    auto train_cfg = load_train_config_file(train_config_path);
    train_cfg.verbose = !quiet;

    const auto kind = model == "bean" ? beansplit::ModelKind::BeanVsTray
                                      : beansplit::ModelKind::SplitVsSeedCoat;
    const auto result = beansplit::train_model(kind, manifest, manifest_path.parent_path(),
                                               net_cfg, train_cfg);
    beansplit::write_file(out_path, beansplit::serialize_weights(result.weights));
    beansplit::write_text_file(history_path, result.history.to_csv());

    beansplit::svg::Series loss{"loss", {}, {}, "#d62728"}, ap{"val_ap", {}, {}, "#1f77b4"};
    for (std::size_t i = 0; i < result.history.epochs.size(); ++i) {
        loss.x.push_back(static_cast<double>(i + 1));
        loss.y.push_back(result.history.epochs[i].loss);
        ap.x.push_back(static_cast<double>(i + 1));
        ap.y.push_back(result.history.epochs[i].val_ap);
    }
    beansplit::write_text_file(with_extension(history_path, ".svg"),
                               beansplit::svg::line_chart({loss, ap}, model + " training",
                                                          "epoch", "value"));
    if (!quiet) {
        std::fprintf(stderr, "wrote %s (%d epochs)\n", out_path.string().c_str(),
                     train_cfg.epochs);
    }
    return 0;
}

int cmd_calibrate(const fs::path& manifest_path, const std::vector<fs::path>& weights,
                  const std::string& criterion, const fs::path& out_path,
                  const fs::path& curve_path) {
    const auto manifest = load_manifest_file(manifest_path);
    const fs::path base = manifest_path.parent_path();
    const auto bean_bytes = beansplit::read_file(weights[0]);
    const auto split_bytes = beansplit::read_file(weights[1]);
    const auto bean_model = beansplit::deserialize_weights(bean_bytes);
    const auto split_model = beansplit::deserialize_weights(split_bytes);
    if (bean_model.kind != beansplit::ModelKind::BeanVsTray ||
        split_model.kind != beansplit::ModelKind::SplitVsSeedCoat) {
        beansplit::fail(beansplit::ErrorCode::ShapeMismatch,
                        "pass the bean weights first, then the split weights");
    }

    const auto scored = score_partition(split_model, manifest, base, beansplit::Partition::Val);
    const auto crit = criterion == "iou" ? beansplit::CalibrationCriterion::IouMax
                                         : beansplit::CalibrationCriterion::BsrErrorMin;
    const auto curve = beansplit::calibrate_threshold(scored, crit);

    beansplit::write_text_file(curve_path, curve.to_csv());
    beansplit::svg::Series iou_s{"iou", curve.thresholds, curve.iou_values, "#1f77b4"};
    beansplit::svg::Series bsr_s{"bsr_error_pct", curve.thresholds, {}, "#d62728"};
    for (double v : curve.bsr_error_pct) {
        bsr_s.y.push_back(std::isfinite(v) ? v : 0.0);
    }
    beansplit::write_text_file(with_extension(curve_path, ".svg"),
                               beansplit::svg::line_chart({iou_s, bsr_s}, "threshold calibration",
                                                          "threshold", "criterion"));

    // the chosen threshold plus the study constants make a complete pipeline
    // config usable as --config for segment/measure/eval
    const std::size_t max_area =
        beansplit::estimate_max_bean_area(partition_masks(manifest, base, beansplit::Partition::Val));
    const fs::path out_dir = out_path.parent_path().empty() ? "." : out_path.parent_path();
    auto rel = [&](const fs::path& p) {
        std::error_code ec;
        const fs::path r = fs::relative(fs::absolute(p), fs::absolute(out_dir), ec);
        return ec ? fs::absolute(p).string() : r.string();
    };
    json j{
        {"bean_weights", rel(weights[0])},
        {"split_weights", rel(weights[1])},
        {"bean_threshold", 0.5},
        {"split_threshold", curve.chosen_threshold},
        {"M", max_area},
        {"N", 10},
        {"connectivity", 8},
        {"criterion", criterion},
    };
    const std::size_t best = static_cast<std::size_t>(
        std::lround(curve.chosen_threshold / (curve.thresholds[1] - curve.thresholds[0])));
    j["calibrated_iou"] = curve.iou_values[best];
    if (std::isfinite(curve.bsr_error_pct[best])) {
        j["calibrated_bsr_error_pct"] = curve.bsr_error_pct[best];
    }
    beansplit::write_text_file(out_path, j.dump(2) + "\n");
    std::printf("chosen threshold %.2f (%s)\n", curve.chosen_threshold, criterion.c_str());
    return 0;
}

int cmd_segment(const fs::path& config_path, const fs::path& image_path,
                const fs::path& out_mask, const fs::path& out_scores) {
    const auto cfg = beansplit::load_pipeline_config(config_path);
    const auto image = beansplit::decode_ppm(beansplit::read_file(image_path));

    const int m = std::max(cfg.bean_model.config.pool_multiple(),
                           cfg.split_model.config.pool_multiple());
    auto [padded, off] = beansplit::pad_to_multiple(image, m);
    const auto bean_prob = beansplit::softmax(beansplit::pyramid_forward(cfg.bean_model, padded));
    const auto split_prob = beansplit::softmax(beansplit::pyramid_forward(cfg.split_model, padded));

    // 3-class scores, channel order (tray, seed coat, split):
    // P(tray) = 1-P(bean); the bean mass is split by the split model.
    beansplit::Tensor scores(image.height, image.width, 3);
    beansplit::LabelMask mask =
        beansplit::LabelMask::filled(image.width, image.height, beansplit::PixelClass::Tray);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const double pb = bean_prob.at(y + off.top, x + off.left)[1];
            const double ps = split_prob.at(y + off.top, x + off.left)[1];
            double* s = scores.at(y, x);
            s[0] = 1.0 - pb;
            s[1] = pb * (1.0 - ps);
            s[2] = pb * ps;
            if (pb >= cfg.bean_threshold) {
                mask.at(x, y) = ps >= cfg.split_threshold ? beansplit::PixelClass::Split
                                                          : beansplit::PixelClass::SeedCoat;
            }
        }
    }
    beansplit::write_file(out_mask, beansplit::encode_image(mask));
    beansplit::write_score_sidecar(out_scores, scores);
    return 0;
}

int cmd_measure(const fs::path& config_path, const fs::path& images_dir, const fs::path& out_path,
                const std::string& json_dir, const std::string& plots_dir) {
    const auto cfg = beansplit::load_pipeline_config(config_path);
    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(images_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".ppm") {
            images.push_back(entry.path());
        }
    }
    std::sort(images.begin(), images.end());
    if (images.empty()) {
        beansplit::fail(beansplit::ErrorCode::EmptySet,
                        "no .ppm images in " + images_dir.string());
    }
    if (!json_dir.empty()) fs::create_directories(json_dir);
    if (!plots_dir.empty()) fs::create_directories(plots_dir);

    std::string out = beansplit::measures_csv_header(cfg.bin_count);
    for (const auto& path : images) {
        const auto image = beansplit::decode_ppm(beansplit::read_file(path));
        const auto sm = beansplit::analyze_image(cfg, image, path.filename().string());
        out += beansplit::measures_csv_row(sm);
        if (!json_dir.empty()) {
            beansplit::write_text_file(fs::path(json_dir) / (path.stem().string() + ".json"),
                                       beansplit::measures_to_json(sm, cfg));
        }
        if (!plots_dir.empty()) {
            beansplit::write_text_file(
                fs::path(plots_dir) / (path.stem().string() + "_bsh.svg"),
                beansplit::svg::bar_chart(sm.bsh_bins, "BSH " + sm.image_id,
                                          "split size bin (units of M/N)", "area ratio"));
        }
    }
    beansplit::write_text_file(out_path, out);
    return 0;
}

int cmd_eval(const fs::path& manifest_path, const fs::path& config_path, const fs::path& out_path) {
    const auto manifest = load_manifest_file(manifest_path);
    const auto cfg = beansplit::load_pipeline_config(config_path);
    const auto scored = score_partition(cfg.split_model, manifest, manifest_path.parent_path(),
                                        beansplit::Partition::Val);
    auto report = beansplit::evaluate_split_scores(scored, cfg.split_threshold,
                                                   cfg.max_split_area, cfg.bin_count,
                                                   cfg.connectivity);
    report.method = "pyramid";
    beansplit::write_text_file(out_path, beansplit::metrics_to_csv({report}));
    std::printf("pyramid: ap %.3f  iou %.3f  bsr_err %.1f%%  bsh_err %.4f\n", report.ap,
                report.iou, report.bsr_error_pct, report.bsh_error);
    return 0;
}

int cmd_baseline_lda(const fs::path& manifest_path, const fs::path& out_path) {
    const auto manifest = load_manifest_file(manifest_path);
    const fs::path base = manifest_path.parent_path();

    // fit on the train partition's ground-truth bean pixels
    std::vector<beansplit::HsvPixel> features;
    std::vector<int> labels;
    for (const auto* rec : manifest.partition(beansplit::Partition::Train)) {
        const auto image = beansplit::decode_ppm(beansplit::read_file(base / rec->image_path));
        const auto mask = beansplit::decode_pgm(beansplit::read_file(base / rec->label_path));
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                const auto c = mask.at(x, y);
                if (c == beansplit::PixelClass::Tray) continue;
                const auto* px = image.at(x, y);
                features.push_back(beansplit::rgb_to_hsv(px[0], px[1], px[2]));
                labels.push_back(c == beansplit::PixelClass::Split ? 1 : 0);
            }
        }
    }
    const auto model = beansplit::lda_fit(features, labels);

    // raw LDA scores in channel 1 put the sigmoid of the score on the same
    // [0,1] probability scale the calibration grid expects
    auto score_masks = [&](beansplit::Partition part) {
        std::vector<beansplit::ScoredMask> scored;
        for (const auto* rec : manifest.partition(part)) {
            const auto image = beansplit::decode_ppm(beansplit::read_file(base / rec->image_path));
            beansplit::ScoredMask sm;
            sm.labels = beansplit::decode_pgm(beansplit::read_file(base / rec->label_path));
            sm.scores = beansplit::ScoreMap(image.height, image.width, 2);
            for (int y = 0; y < image.height; ++y) {
                for (int x = 0; x < image.width; ++x) {
                    const auto* px = image.at(x, y);
                    sm.scores.at(y, x)[1] =
                        beansplit::lda_score(model, beansplit::rgb_to_hsv(px[0], px[1], px[2]));
                }
            }
            scored.push_back(std::move(sm));
        }
        return scored;
    };

    const auto train_scored = score_masks(beansplit::Partition::Train);
    const auto curve = beansplit::calibrate_threshold(
        train_scored, beansplit::CalibrationCriterion::IouMax);

    const auto val_scored = score_masks(beansplit::Partition::Val);
    const std::size_t max_area =
        beansplit::estimate_max_bean_area(partition_masks(manifest, base, beansplit::Partition::Val));
    auto report = beansplit::evaluate_split_scores(val_scored, curve.chosen_threshold, max_area,
                                                   10, 8);
    report.method = "lda";
    beansplit::write_text_file(out_path, beansplit::metrics_to_csv({report}));
    std::printf("lda: ap %.3f  iou %.3f  bsr_err %.1f%%  bsh_err %.4f\n", report.ap, report.iou,
                report.bsr_error_pct, report.bsh_error);
    return 0;
}

int cmd_stats(const fs::path& measures_path, const fs::path& manifest_path,
              const fs::path& out_path, const std::string& plots_dir) {
    const auto measures = beansplit::load_measures_csv(beansplit::read_text_file(measures_path));
    const auto manifest = load_manifest_file(manifest_path);

    // join measures rows to manifest records by image path or filename
    std::map<std::string, const beansplit::SampleRecord*> by_path, by_name;
    for (const auto& rec : manifest.records) {
        by_path[rec.image_path] = &rec;
        by_name[fs::path(rec.image_path).filename().string()] = &rec;
    }

    beansplit::StudyTable study;
    std::vector<double> bsr_values, intactness_values;
    for (const auto& row : measures.rows) {
        const beansplit::SampleRecord* rec = nullptr;
        if (auto it = by_path.find(row.image_id); it != by_path.end()) rec = it->second;
        else if (auto it2 = by_name.find(row.image_id); it2 != by_name.end()) rec = it2->second;
        if (!rec) {
            beansplit::fail(beansplit::ErrorCode::MissingColumn,
                            "measures row " + row.image_id + " has no manifest record");
        }
        beansplit::StudyObservation o;
        o.genotype = rec->genotype;
        o.retort_min = rec->retort_min;
        o.replicate = rec->replicate;
        o.value = row.bsr;
        study.traits["bsr"].push_back(o);
        for (int b = 0; b < measures.bin_count; ++b) {
            o.value = row.bsh_bins[b];
            study.traits["bsh_bin_" + std::to_string(b + 1)].push_back(o);
        }
        if (rec->intactness) {
            bsr_values.push_back(row.bsr);
            intactness_values.push_back(*rec->intactness);
        }
    }

    json out;
    if (bsr_values.size() >= 2) {
        try {
            out["pearson"] = {{"r", beansplit::pearson_r(bsr_values, intactness_values)},
                              {"n", bsr_values.size()}};
        } catch (const beansplit::Error& e) {
            out["pearson"] = {{"error", e.what()}, {"n", bsr_values.size()}};
        }
    } else {
        out["pearson"] = nullptr;  // intactness ratings absent
    }

    std::vector<double> bin_h2;
    for (const auto& [trait, obs] : study.traits) {
        const auto table = beansplit::anova_two_way(obs);
        const auto vc = beansplit::variance_components(obs);
        json anova = json::array();
        for (const auto& r : table.rows) {
            json row{{"source", r.source}, {"df", r.df}, {"ss", r.ss}, {"ms", r.ms}};
            if (std::isfinite(r.f)) {
                row["F"] = r.f;
                row["p"] = r.p;
            }
            anova.push_back(row);
        }
        double h2 = 0.0;
        try {
            h2 = beansplit::heritability(vc);
        } catch (const beansplit::Error&) {
            h2 = 0.0;  // all components zero
        }
        out["traits"][trait] = {
            {"anova", anova},
            {"components",
             {{"genotype", vc.genotype},
              {"interaction", vc.interaction},
              {"residual", vc.residual},
              {"t", vc.retort_levels},
              {"r", vc.replicates}}},
            {"heritability", h2},
        };
        if (trait.rfind("bsh_bin_", 0) == 0) {
            const int idx = std::stoi(trait.substr(8));
            if (static_cast<int>(bin_h2.size()) < idx) bin_h2.resize(idx, 0.0);
            bin_h2[idx - 1] = h2;
        }
    }

    beansplit::write_text_file(out_path, out.dump(2) + "\n");
    const fs::path out_dir = out_path.parent_path().empty() ? "." : out_path.parent_path();
    beansplit::write_text_file(out_dir / "study.csv", beansplit::study_to_csv(study));

    if (!plots_dir.empty()) {
        fs::create_directories(plots_dir);
        beansplit::write_text_file(fs::path(plots_dir) / "bsh_heritability.svg",
                                   beansplit::svg::bar_chart(bin_h2, "BSH bin heritability",
                                                             "bin", "H^2"));
        if (bsr_values.size() >= 2) {
            beansplit::svg::Series s{"samples", bsr_values, intactness_values, "#1f77b4"};
            beansplit::write_text_file(
                fs::path(plots_dir) / "bsr_vs_intactness.svg",
                beansplit::svg::scatter_chart(s, "BSR vs panel intactness", "bsr", "intactness"));
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bean split quantification: segmentation, BSR/BSH measures, study statistics"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "Train the bean or split segmentation model");
    fs::path t_manifest, t_netcfg, t_traincfg, t_out, t_history;
    std::string t_model;
    bool t_quiet = false;
    train->add_option("--manifest", t_manifest, "dataset manifest CSV")->required();
    train->add_option("--model", t_model, "bean or split")
        ->required()
        ->check(CLI::IsMember({"bean", "split"}));
    train->add_option("--net-config", t_netcfg, "network config JSON")->required();
    train->add_option("--train-config", t_traincfg, "training config JSON")->required();
    train->add_option("--out", t_out, "output weight file (.bswt)")->required();
    train->add_option("--history", t_history, "per-epoch history CSV")->required();
    train->add_flag("--quiet", t_quiet, "suppress progress output");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "Select the split threshold on validation data");
    fs::path c_manifest, c_out, c_curve;
    std::vector<fs::path> c_weights;
    std::string c_criterion;
    calibrate->add_option("--manifest", c_manifest)->required();
    calibrate->add_option("--weights", c_weights, "bean weights, then split weights")
        ->required()
        ->expected(2);
    calibrate->add_option("--criterion", c_criterion)
        ->required()
        ->check(CLI::IsMember({"iou", "bsr"}));
    calibrate->add_option("--out", c_out, "pipeline config JSON output")->required();
    calibrate->add_option("--curve", c_curve, "calibration curve CSV output")->required();

    // segment
    auto* segment = app.add_subcommand("segment", "Segment one image into tray/seed-coat/split");
    fs::path s_config, s_image, s_mask, s_scores;
    segment->add_option("--config", s_config, "pipeline config JSON")->required();
    segment->add_option("--image", s_image, "input PPM")->required();
    segment->add_option("--out-mask", s_mask, "output 3-class PGM")->required();
    segment->add_option("--out-scores", s_scores, "output raw float32 score sidecar")->required();

    // measure
    auto* measure = app.add_subcommand("measure", "Compute BSR/BSH for a directory of images");
    fs::path m_config, m_images, m_out;
    std::string m_json_dir, m_plots_dir;
    measure->add_option("--config", m_config)->required();
    measure->add_option("--images", m_images, "directory of .ppm images")->required();
    measure->add_option("--out", m_out, "measures CSV output")->required();
    measure->add_option("--json-dir", m_json_dir, "also write per-image measures JSON here");
    measure->add_option("--plots", m_plots_dir, "also write per-image BSH bar charts here");

    // eval
    auto* eval = app.add_subcommand("eval", "Accuracy metrics on the validation partition");
    fs::path e_manifest, e_config, e_out;
    eval->add_option("--manifest", e_manifest)->required();
    eval->add_option("--config", e_config)->required();
    eval->add_option("--out", e_out, "metrics CSV output")->required();

    // baseline-lda
    auto* lda = app.add_subcommand("baseline-lda", "LDA-on-HSV baseline metrics");
    fs::path l_manifest, l_out;
    lda->add_option("--manifest", l_manifest)->required();
    lda->add_option("--out", l_out, "metrics CSV output")->required();

    // stats
    auto* stats = app.add_subcommand("stats", "Correlation, ANOVA and heritability per trait");
    fs::path st_measures, st_manifest, st_out;
    std::string st_plots;
    stats->add_option("--measures", st_measures, "measures CSV from the measure subcommand")
        ->required();
    stats->add_option("--manifest", st_manifest)->required();
    stats->add_option("--out", st_out, "stats JSON output")->required();
    stats->add_option("--plots", st_plots, "plot output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*train) {
            return cmd_train(t_manifest, t_model, t_netcfg, t_traincfg, t_out, t_history, t_quiet);
        }
        if (*calibrate) {
            return cmd_calibrate(c_manifest, c_weights, c_criterion, c_out, c_curve);
        }
        if (*segment) return cmd_segment(s_config, s_image, s_mask, s_scores);
        if (*measure) return cmd_measure(m_config, m_images, m_out, m_json_dir, m_plots_dir);
        if (*eval) return cmd_eval(e_manifest, e_config, e_out);
        if (*lda) return cmd_baseline_lda(l_manifest, l_out);
        if (*stats) return cmd_stats(st_measures, st_manifest, st_out, st_plots);
    } catch (const beansplit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.numeric() ? kExitNumeric : kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
