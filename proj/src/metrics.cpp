#include "dept/metrics.hpp"

#include "dept/raster_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace fs = std::filesystem;

namespace dept {

ConfusionCounts confusion_counts(const Mask& pred, const Mask& gt) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw std::invalid_argument("confusion_counts: dimension mismatch");
    ConfusionCounts c;
    for (size_t i = 0; i < pred.data.size(); ++i) {
        if (pred.data[i] && gt.data[i]) ++c.tp;
        else if (pred.data[i] && !gt.data[i]) ++c.fp;
        else if (!pred.data[i] && gt.data[i]) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double iou(const ConfusionCounts& c) {
    const std::uint64_t denom = c.tp + c.fn + c.fp;
    if (denom == 0) return 1.0;
    return static_cast<double>(c.tp) / static_cast<double>(denom);
}

double dice(const ConfusionCounts& c) {
    const std::uint64_t denom = 2 * c.tp + c.fn + c.fp;
    if (denom == 0) return 1.0;
    return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

namespace {

bool is_mask_file(const fs::path& p) {
    const auto ext = p.extension();
    return ext == ".png" || ext == ".pgm";
}

std::map<std::string, fs::path> list_mask_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
    std::map<std::string, fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_mask_file(entry.path()))
            files[entry.path().filename().string()] = entry.path();
    }
    return files;
}

} // namespace

EvalReport evaluate_dataset(const fs::path& pred_dir, const fs::path& gt_dir) {
    const auto preds = list_mask_files(pred_dir);
    const auto gts = list_mask_files(gt_dir);

    std::set<std::string> names;
    for (const auto& [name, _] : preds) names.insert(name);
    for (const auto& [name, _] : gts) names.insert(name);

    bool any_pair = false;
    for (const auto& name : names)
        if (preds.count(name) && gts.count(name)) any_pair = true;
    if (!any_pair) throw std::runtime_error("no pairs: prediction and ground-truth filenames do not overlap");

    EvalReport report;
    double sum_iou = 0.0, sum_dice = 0.0;
    for (const auto& name : names) {
        EvalRow row;
        row.id = name;
        try {
            if (!preds.count(name)) throw std::runtime_error("missing prediction");
            if (!gts.count(name)) throw std::runtime_error("missing ground truth");
            const Mask pred = read_mask(preds.at(name));
            const Mask gt = read_mask(gts.at(name));
            const ConfusionCounts c = confusion_counts(pred, gt);
            row.iou = iou(c);
            row.dice = dice(c);
            sum_iou += row.iou;
            sum_dice += row.dice;
            ++report.evaluated;
        } catch (const std::exception& e) {
            row.error = e.what();
            ++report.failed;
        }
        report.rows.push_back(std::move(row));
    }
    if (report.evaluated > 0) {
        report.mean_iou = sum_iou / report.evaluated;
        report.mean_dice = sum_dice / report.evaluated;
    }
    return report;
}

void write_eval_csv(const EvalReport& report, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report: " + path.string());
    out << "id,iou,dice\n";
    char buf[64];
    for (const EvalRow& row : report.rows) {
        if (!row.error.empty()) continue;
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f", row.iou, row.dice);
        out << row.id << "," << buf << "\n";
    }
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f", report.mean_iou, report.mean_dice);
    out << "MEAN," << buf << "\n";
}

} // namespace dept
