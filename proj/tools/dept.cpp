#include "dept/fgpem.hpp"
#include "dept/metrics.hpp"
#include "dept/overlay.hpp"
#include "dept/raster_io.hpp"
#include "dept/refine.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace dept;

// Exit codes: 0 success, 1 input error, 2 partial/event failure (and flag misuse).
namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kPartialFailure = 2;

std::vector<fs::path> list_masks_sorted(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const fs::path p = entry.path();
        if (p.extension() == ".png" || p.extension() == ".pgm") files.push_back(p);
    }
    std::sort(files.begin(), files.end());
    return files;
}

int extract_one(const fs::path& mask_path, const fs::path& out_path) {
    const Mask mask = read_mask(mask_path);
    const ExtremePoints pts = extract_extreme_points(mask);
    const bool multi = count_components(mask) > 1;
    if (multi) {
        std::fprintf(stderr, "warning: %s has multiple components, points span all of them\n",
                     mask_path.string().c_str());
    }
    write_points_json(pts, out_path, multi);
    return kOk;
}

int cmd_extract_points(const std::string& mask, const std::string& out,
                       const std::string& mask_dir, const std::string& out_dir) {
    if (!mask.empty()) {
        if (out.empty()) {
            std::fprintf(stderr, "error: --mask requires --out\n");
            return kPartialFailure;
        }
        return extract_one(mask, out);
    }
    if (mask_dir.empty()) {
        std::fprintf(stderr, "error: need --mask/--out or --mask-dir/--out-dir\n");
        return kPartialFailure;
    }
    if (out_dir.empty()) {
        std::fprintf(stderr, "error: --mask-dir requires --out-dir\n");
        return kPartialFailure;
    }

    if (!fs::is_directory(mask_dir)) throw std::runtime_error("mask dir not found: " + mask_dir);
    const std::vector<fs::path> files = list_masks_sorted(mask_dir);
    if (files.empty()) throw std::runtime_error("no masks in " + mask_dir);
    fs::create_directories(out_dir);

    int failed = 0;
    for (const fs::path& f : files) {
        const fs::path out_path = fs::path(out_dir) / (f.stem().string() + ".json");
        try {
            extract_one(f, out_path);
            std::printf("%s -> %s\n", f.string().c_str(), out_path.string().c_str());
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s: %s\n", f.string().c_str(), e.what());
            ++failed;
        }
    }
    return failed > 0 ? kPartialFailure : kOk;
}

int cmd_gen_label(const std::string& image, const std::string& feature, const std::string& points,
                  const std::string& out, const FgpemOptions& opts, bool use_clahe,
                  const ClaheParams& clahe_params) {
    const ExtremePoints pts = read_points_json(points);
    Mask label;
    if (!image.empty()) {
        const GrayImage img = read_gray_image(image);
        label = fgpem_generate(img, pts, opts, use_clahe, clahe_params);
    } else {
        const FeatureMap fm = read_f32_raster(feature);
        label = fgpem_generate(fm, pts, opts, false);
    }
    write_mask_atomic(label, out);
    return kOk;
}

int cmd_refine(const std::string& config_path, bool surrogate) {
    SessionConfig cfg = load_session_config(config_path);

    std::map<std::string, Mask> gt;
    const std::map<std::string, Mask>* gt_ptr = nullptr;
    if (!cfg.gt_dir.empty()) {
        for (const std::string& id : cfg.session.ids) {
            for (const char* ext : {".png", ".pgm"}) {
                const fs::path p = cfg.gt_dir / (id + ext);
                if (fs::exists(p)) {
                    gt[id] = read_mask(p);
                    break;
                }
            }
        }
        gt_ptr = &gt;
    }

    const ProviderKind provider = surrogate ? ProviderKind::surrogate : ProviderKind::files;
    const RefineReport report =
        run_refinement(cfg.session, cfg.schedule, provider, cfg.surrogate_sharpness, gt_ptr);

    bool any_failure = false;
    for (size_t k = 0; k < report.events.size(); ++k) {
        const UpdateReport& ev = report.events[k];
        std::printf("event %zu/%zu: epoch %d, version %d, %zu labeled, %zu failed\n", k + 1,
                    report.events.size(), ev.epoch, ev.version, ev.records.size(),
                    ev.failures.size());
        for (const ImageFailure& f : ev.failures) {
            std::printf("  failed %s: %s\n", f.id.c_str(), f.error.c_str());
            any_failure = true;
        }
        if (!report.event_mean_iou.empty()) {
            std::printf("  mean IoU vs ground truth: %.6f\n", report.event_mean_iou[k]);
        }
    }
    return any_failure ? kPartialFailure : kOk;
}

int cmd_eval(const std::string& pred, const std::string& gt, const std::string& report_path) {
    const EvalReport report = evaluate_dataset(pred, gt);
    write_eval_csv(report, report_path);
    for (const EvalRow& row : report.rows) {
        if (!row.error.empty()) std::fprintf(stderr, "error: %s: %s\n", row.id.c_str(), row.error.c_str());
    }
    std::printf("evaluated %d pairs, %d failed\n", report.evaluated, report.failed);
    std::printf("mIoU %.6f\n", report.mean_iou);
    std::printf("mDice %.6f\n", report.mean_dice);
    return report.failed > 0 ? kPartialFailure : kOk;
}

int cmd_overlay(const std::string& image, const std::string& label, const std::string& gt,
                const std::string& out) {
    const GrayImage img = read_gray_image(image);
    const Mask label_mask = read_mask(label);
    Mask gt_mask;
    const Mask* gt_ptr = nullptr;
    if (!gt.empty()) {
        gt_mask = read_mask(gt);
        gt_ptr = &gt_mask;
    }
    const std::vector<std::uint8_t> rgb = render_overlay(img, label_mask, gt_ptr);
    write_rgb_png(rgb, img.width, img.height, out);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-label generation and refinement from extreme points"};
    app.require_subcommand(1);

    std::function<int()> run;

    // extract-points
    {
        auto* sub = app.add_subcommand("extract-points", "Extreme points of binary masks to JSON");
        auto mask = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto mask_dir = std::make_shared<std::string>();
        auto out_dir = std::make_shared<std::string>();
        auto* mask_opt = sub->add_option("--mask", *mask, "Input binary mask (PNG or PGM)");
        sub->add_option("--out", *out, "Output points JSON path");
        auto* dir_opt = sub->add_option("--mask-dir", *mask_dir, "Directory of masks (batch mode)");
        sub->add_option("--out-dir", *out_dir, "Output directory for points JSON files");
        mask_opt->excludes(dir_opt);
        sub->callback([=, &run] {
            run = [=] { return cmd_extract_points(*mask, *out, *mask_dir, *out_dir); };
        });
    }

    // gen-label
    {
        auto* sub = app.add_subcommand("gen-label", "Generate one pseudo label from extreme points");
        auto image = std::make_shared<std::string>();
        auto feature = std::make_shared<std::string>();
        auto points = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto opts = std::make_shared<FgpemOptions>();
        auto no_normalize = std::make_shared<bool>(false);
        auto clahe_flag = std::make_shared<bool>(false);
        auto clahe_params = std::make_shared<ClaheParams>();
        auto tiles = std::make_shared<std::vector<int>>();

        auto* image_opt = sub->add_option("--image", *image, "Grayscale input image (PNG or PGM)");
        auto* feature_opt = sub->add_option("--feature", *feature, "Feature map (.f32r); disables CLAHE");
        image_opt->excludes(feature_opt);
        feature_opt->excludes(image_opt);
        sub->add_option("--points", *points, "Extreme points JSON")->required();
        sub->add_option("--out", *out, "Output label PNG")->required();
        sub->add_option("--scale", opts->scale, "Downsample factor in (0,1]")->capture_default_str();
        sub->add_option("--epsilon", opts->epsilon, "Cost matrix epsilon")->capture_default_str();
        sub->add_flag("--no-normalize", *no_normalize, "Skip gradient max-normalization");
        sub->add_flag("--straight", opts->use_straight_baseline,
                      "Straight-line baseline instead of min-cost paths");
        auto* clahe_opt = sub->add_flag("--clahe", *clahe_flag, "Apply CLAHE before the gradient");
        clahe_opt->excludes(feature_opt);
        sub->add_option("--clip-limit", clahe_params->clip_limit, "CLAHE clip limit")
            ->capture_default_str();
        sub->add_option("--tiles", *tiles, "CLAHE tile grid as X Y")->expected(2);

        sub->callback([=, &run] {
            run = [=] {
                if (image->empty() && feature->empty()) {
                    std::fprintf(stderr, "error: need --image or --feature\n");
                    return kPartialFailure;
                }
                FgpemOptions o = *opts;
                o.normalize = !*no_normalize;
                ClaheParams cp = *clahe_params;
                if (!tiles->empty()) {
                    cp.tiles_x = (*tiles)[0];
                    cp.tiles_y = (*tiles)[1];
                }
                return cmd_gen_label(*image, *feature, *points, *out, o, *clahe_flag, cp);
            };
        });
    }

    // refine
    {
        auto* sub = app.add_subcommand("refine", "Run the scheduled label refinement loop");
        auto config = std::make_shared<std::string>();
        auto surrogate = std::make_shared<bool>(false);
        sub->add_option("--config", *config, "Session config JSON")->required();
        sub->add_flag("--surrogate", *surrogate,
                      "Synthesize feature maps by blurring current labels (self-contained demo)");
        sub->callback([=, &run] { run = [=] { return cmd_refine(*config, *surrogate); }; });
    }

    // eval
    {
        auto* sub = app.add_subcommand("eval", "IoU/Dice of predicted masks against ground truth");
        auto pred = std::make_shared<std::string>();
        auto gt = std::make_shared<std::string>();
        auto report = std::make_shared<std::string>();
        sub->add_option("--pred", *pred, "Directory of predicted masks")->required();
        sub->add_option("--gt", *gt, "Directory of ground-truth masks")->required();
        sub->add_option("--report", *report, "Output CSV report path")->required();
        sub->callback([=, &run] { run = [=] { return cmd_eval(*pred, *gt, *report); }; });
    }

    // overlay
    {
        auto* sub = app.add_subcommand("overlay", "Render label (red) and ground truth (green) boundaries");
        auto image = std::make_shared<std::string>();
        auto label = std::make_shared<std::string>();
        auto gt = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        sub->add_option("--image", *image, "Grayscale base image")->required();
        sub->add_option("--label", *label, "Label mask PNG")->required();
        sub->add_option("--gt", *gt, "Optional ground-truth mask PNG");
        sub->add_option("--out", *out, "Output RGB PNG")->required();
        sub->callback([=, &run] { run = [=] { return cmd_overlay(*image, *label, *gt, *out); }; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kPartialFailure;
    }

    try {
        return run ? run() : kPartialFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInputError;
    }
}
