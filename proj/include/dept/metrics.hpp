#ifndef DEPT_METRICS_HPP
#define DEPT_METRICS_HPP

#include "dept/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dept {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
};

/// Pixelwise tally of prediction vs ground truth. Throws on dimension mismatch.
ConfusionCounts confusion_counts(const Mask& pred, const Mask& gt);

/// TP / (TP + FN + FP); 1.0 when both masks are empty.
double iou(const ConfusionCounts& c);

/// 2TP / (2TP + FN + FP); 1.0 when both masks are empty.
double dice(const ConfusionCounts& c);

struct EvalRow {
    std::string id;
    double iou = 0.0;
    double dice = 0.0;
    std::string error; // non-empty if the pair failed; excluded from the means
};

struct EvalReport {
    std::vector<EvalRow> rows; // sorted by id
    double mean_iou = 0.0;
    double mean_dice = 0.0;
    int evaluated = 0;
    int failed = 0;
};

/// Pairs mask files by filename across the two directories and averages
/// per-image IoU/Dice. Unpaired files and dimension mismatches are reported
/// per image and excluded from the means. Throws if no filename is shared.
EvalReport evaluate_dataset(const std::filesystem::path& pred_dir,
                            const std::filesystem::path& gt_dir);

/// CSV with columns id,iou,dice (6 decimals) for each evaluated image and a
/// final row MEAN,<mIoU>,<mDice>. Failed pairs are omitted from the table.
void write_eval_csv(const EvalReport& report, const std::filesystem::path& path);

} // namespace dept

#endif
