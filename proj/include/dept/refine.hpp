#ifndef DEPT_REFINE_HPP
#define DEPT_REFINE_HPP

#include "dept/fgpem.hpp"
#include "dept/raster.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace dept {

/// Epoch milestones at which pseudo labels are regenerated.
struct RefineSchedule {
    int total_epochs = 0; // N
    int interval = 0;     // n
    std::vector<int> update_epochs;

    bool is_update_epoch(int epoch) const;
};

/// update_epochs = {0, n, 2n, ...} intersected with [0, N). Epoch 0 is always
/// an update: the initial labels come from the images themselves.
RefineSchedule plan_schedule(int total_epochs, int interval);

struct LabelRecord {
    std::string id;
    int version = 0;
    int epoch = 0;
    std::string path;   // relative to the labels dir
    std::string source; // "image" or "feature"
    std::string checksum;
};

struct ImageFailure {
    std::string id;
    std::string error;
};

/// Outcome of one update event.
struct UpdateReport {
    int epoch = 0;
    int version = 0;
    std::vector<LabelRecord> records;
    std::vector<ImageFailure> failures;
};

struct RefineSession {
    std::vector<std::string> ids; // sorted
    std::filesystem::path images_dir;
    std::filesystem::path features_dir;
    std::filesystem::path labels_dir;
    FgpemOptions options;
    ClaheParams clahe_params;
    std::map<std::string, ExtremePoints> points; // one entry per id
    int current_version = 0;                     // completed update events

    std::filesystem::path manifest_path() const { return labels_dir / "manifest.jsonl"; }
    std::filesystem::path label_path(const std::string& id, int epoch) const;
};

/// Supplies the feature map for an image at an update epoch (epoch > 0), or
/// throws to report that image as failed.
using FeatureSource = std::function<FeatureMap(const std::string& id, int epoch)>;

/// Reads features/epoch_{epoch:04}/{id}.f32r under the session's features dir.
FeatureSource file_feature_source(const RefineSession& session);

/// Regenerates all labels for one update epoch. Epoch 0 derives initial labels
/// from the images (with CLAHE); later epochs derive them from feature maps
/// (no CLAHE). Labels are written via temp file + rename under
/// labels/epoch_{epoch:04}/{id}.png, records are appended to manifest.jsonl,
/// and the session version is incremented once. Per-image errors are collected
/// in the report; only session-level I/O failures throw.
UpdateReport update_labels(RefineSession& session, const RefineSchedule& schedule, int epoch,
                           const FeatureSource& features = {});

/// Gaussian blur of a binary label (std dev = sharpness, replicate border).
/// Its Sobel gradient peaks on the label boundary, which makes it a stand-in
/// for a trainer's feature map in closed-loop runs.
FeatureMap surrogate_feature_provider(const Mask& label, double sharpness);

enum class ProviderKind { files, surrogate };

struct RefineReport {
    std::vector<UpdateReport> events;
    std::vector<double> event_mean_iou; // parallel to events; empty without ground truth
};

/// Runs every update epoch in order. With ProviderKind::files the feature maps
/// come from the directory protocol; with ProviderKind::surrogate they are
/// synthesized by blurring each image's most recent label, taking the std dev
/// for the k-th feature event from surrogate_sharpness (last value repeats).
/// When ground truth is given, the per-event mean IoU of the current labels is
/// recorded for diagnostics.
RefineReport run_refinement(RefineSession& session, const RefineSchedule& schedule,
                            ProviderKind provider,
                            const std::vector<double>& surrogate_sharpness = {4.0, 2.0, 1.0},
                            const std::map<std::string, Mask>* ground_truth = nullptr);

/// Session config document; see README for the JSON schema.
struct SessionConfig {
    RefineSession session;
    RefineSchedule schedule;
    std::filesystem::path gt_dir;             // empty when absent
    std::vector<double> surrogate_sharpness = {4.0, 2.0, 1.0};
};

SessionConfig load_session_config(const std::filesystem::path& config_path);

} // namespace dept

#endif
