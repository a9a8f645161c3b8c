#include "dept/refine.hpp"

#include "dept/metrics.hpp"
#include "dept/preprocess.hpp"
#include "dept/raster_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace dept {

bool RefineSchedule::is_update_epoch(int epoch) const {
    return std::find(update_epochs.begin(), update_epochs.end(), epoch) != update_epochs.end();
}

RefineSchedule plan_schedule(int total_epochs, int interval) {
    if (total_epochs < 1) throw std::invalid_argument("total_epochs must be >= 1");
    if (interval < 1) throw std::invalid_argument("interval must be >= 1");
    RefineSchedule s;
    s.total_epochs = total_epochs;
    s.interval = interval;
    for (int e = 0; e < total_epochs; e += interval) s.update_epochs.push_back(e);
    return s;
}

static std::string epoch_dir_name(int epoch) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "epoch_%04d", epoch);
    return buf;
}

fs::path RefineSession::label_path(const std::string& id, int epoch) const {
    return labels_dir / epoch_dir_name(epoch) / (id + ".png");
}

FeatureSource file_feature_source(const RefineSession& session) {
    const fs::path dir = session.features_dir;
    return [dir](const std::string& id, int epoch) {
        const fs::path p = dir / epoch_dir_name(epoch) / (id + ".f32r");
        if (!fs::exists(p)) throw std::runtime_error("feature map not found: " + p.string());
        return read_f32_raster(p);
    };
}

static GrayImage read_session_image(const RefineSession& session, const std::string& id) {
    for (const char* ext : {".png", ".pgm"}) {
        const fs::path p = session.images_dir / (id + ext);
        if (fs::exists(p)) return read_gray_image(p);
    }
    throw std::runtime_error("image not found for id '" + id + "' in " + session.images_dir.string());
}

static void append_manifest_line(std::ofstream& manifest, const LabelRecord& rec) {
    nlohmann::json j;
    j["id"] = rec.id;
    j["version"] = rec.version;
    j["epoch"] = rec.epoch;
    j["path"] = rec.path;
    j["source"] = rec.source;
    j["checksum"] = rec.checksum;
    manifest << j.dump() << "\n";
    manifest.flush();
}

UpdateReport update_labels(RefineSession& session, const RefineSchedule& schedule, int epoch,
                           const FeatureSource& features) {
    if (!schedule.is_update_epoch(epoch)) {
        throw std::invalid_argument("epoch " + std::to_string(epoch) + " is not an update epoch");
    }

    const fs::path epoch_dir = session.labels_dir / epoch_dir_name(epoch);
    std::error_code ec;
    fs::create_directories(epoch_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + epoch_dir.string() + ": " + ec.message());

    std::ofstream manifest(session.manifest_path(), std::ios::app);
    if (!manifest) {
        throw std::runtime_error("cannot open manifest for append: " + session.manifest_path().string());
    }

    const FeatureSource source = features ? features : file_feature_source(session);

    UpdateReport report;
    report.epoch = epoch;
    report.version = session.current_version + 1;

    for (const std::string& id : session.ids) {
        try {
            const auto pit = session.points.find(id);
            if (pit == session.points.end()) throw std::runtime_error("no extreme points for id '" + id + "'");

            Mask label;
            if (epoch == 0) {
                const GrayImage img = read_session_image(session, id);
                label = initial_pseudo_label(img, pit->second, session.options, session.clahe_params);
            } else {
                const FeatureMap fm = source(id, epoch);
                label = fgpem_generate(fm, pit->second, session.options, false);
            }

            const fs::path out = session.label_path(id, epoch);
            write_mask_atomic(label, out);

            LabelRecord rec;
            rec.id = id;
            rec.version = report.version;
            rec.epoch = epoch;
            rec.path = (fs::path(epoch_dir_name(epoch)) / (id + ".png")).generic_string();
            rec.source = epoch == 0 ? "image" : "feature";
            rec.checksum = crc32_hex(read_file_bytes(out));
            append_manifest_line(manifest, rec);
            report.records.push_back(std::move(rec));
        } catch (const std::exception& e) {
            report.failures.push_back({id, e.what()});
        }
    }

    session.current_version = report.version;
    return report;
}

FeatureMap surrogate_feature_provider(const Mask& label, double sharpness) {
    if (!(sharpness > 0.0)) throw std::invalid_argument("sharpness must be > 0");
    const int w = label.width;
    const int h = label.height;

    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sharpness)));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(i * i) / (2.0 * sharpness * sharpness));
        kernel[i + radius] = v;
        ksum += v;
    }
    for (double& v : kernel) v /= ksum;

    std::vector<double> row_pass(static_cast<size_t>(w) * h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int cc = std::clamp(c + i, 0, w - 1);
                acc += kernel[i + radius] * (label.data[static_cast<size_t>(r) * w + cc] ? 1.0 : 0.0);
            }
            row_pass[static_cast<size_t>(r) * w + c] = acc;
        }
    }

    FeatureMap fm(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int rr = std::clamp(r + i, 0, h - 1);
                acc += kernel[i + radius] * row_pass[static_cast<size_t>(rr) * w + c];
            }
            fm.data[static_cast<size_t>(r) * w + c] = static_cast<float>(acc);
        }
    }
    return fm;
}

// Most recent label for an id at or before the given position in the schedule.
static fs::path find_latest_label(const RefineSession& session, const RefineSchedule& schedule,
                                  const std::string& id, size_t upto_index) {
    for (size_t k = upto_index + 1; k-- > 0;) {
        const fs::path p = session.label_path(id, schedule.update_epochs[k]);
        if (fs::exists(p)) return p;
    }
    return {};
}

RefineReport run_refinement(RefineSession& session, const RefineSchedule& schedule,
                            ProviderKind provider,
                            const std::vector<double>& surrogate_sharpness,
                            const std::map<std::string, Mask>* ground_truth) {
    if (provider == ProviderKind::surrogate && surrogate_sharpness.empty()) {
        throw std::invalid_argument("surrogate provider needs at least one sharpness value");
    }

    RefineReport out;
    for (size_t k = 0; k < schedule.update_epochs.size(); ++k) {
        const int epoch = schedule.update_epochs[k];

        FeatureSource source;
        if (epoch > 0 && provider == ProviderKind::surrogate) {
            const size_t si = std::min(k - 1, surrogate_sharpness.size() - 1);
            const double sharpness = surrogate_sharpness[si];
            const size_t prev_index = k - 1;
            source = [&session, &schedule, prev_index, sharpness](const std::string& id, int) {
                const fs::path prev = find_latest_label(session, schedule, id, prev_index);
                if (prev.empty()) throw std::runtime_error("no previous label for id '" + id + "'");
                return surrogate_feature_provider(read_mask(prev), sharpness);
            };
        }

        out.events.push_back(update_labels(session, schedule, epoch, source));

        if (ground_truth != nullptr) {
            double sum = 0.0;
            int n = 0;
            for (const std::string& id : session.ids) {
                const auto git = ground_truth->find(id);
                if (git == ground_truth->end()) continue;
                const fs::path p = find_latest_label(session, schedule, id, k);
                if (p.empty()) continue;
                sum += iou(confusion_counts(read_mask(p), git->second));
                ++n;
            }
            out.event_mean_iou.push_back(n > 0 ? sum / n : 0.0);
        }
    }
    return out;
}

static fs::path resolve_path(const fs::path& base, const std::string& value) {
    fs::path p(value);
    return p.is_absolute() ? p : base / p;
}

static std::vector<std::string> list_image_ids(const fs::path& images_dir) {
    if (!fs::is_directory(images_dir)) {
        throw std::runtime_error("images dir not found: " + images_dir.string());
    }
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(images_dir)) {
        if (!entry.is_regular_file()) continue;
        const fs::path p = entry.path();
        if (p.extension() == ".png" || p.extension() == ".pgm") ids.push_back(p.stem().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

SessionConfig load_session_config(const fs::path& config_path) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config: " + config_path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("invalid config JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw std::runtime_error("config must be a JSON object");

    const fs::path base = config_path.has_parent_path() ? config_path.parent_path() : fs::path(".");

    auto require_string = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_string()) {
            throw std::runtime_error(std::string("config: missing string field '") + key + "'");
        }
        return j[key].get<std::string>();
    };

    SessionConfig cfg;
    cfg.session.images_dir = resolve_path(base, require_string("images_dir"));
    cfg.session.labels_dir = resolve_path(base, require_string("labels_dir"));
    if (j.contains("features_dir")) cfg.session.features_dir = resolve_path(base, require_string("features_dir"));
    const fs::path points_dir = resolve_path(base, require_string("points_dir"));

    if (!j.contains("total_epochs") || !j.contains("interval")) {
        throw std::runtime_error("config: total_epochs and interval are required");
    }
    cfg.schedule = plan_schedule(j["total_epochs"].get<int>(), j["interval"].get<int>());

    if (j.contains("scale")) cfg.session.options.scale = j["scale"].get<double>();
    if (j.contains("epsilon")) cfg.session.options.epsilon = j["epsilon"].get<double>();
    if (j.contains("normalize")) cfg.session.options.normalize = j["normalize"].get<bool>();
    if (j.contains("straight")) cfg.session.options.use_straight_baseline = j["straight"].get<bool>();
    if (j.contains("clip_limit")) cfg.session.clahe_params.clip_limit = j["clip_limit"].get<double>();
    if (j.contains("tiles")) {
        const auto& t = j["tiles"];
        if (!t.is_array() || t.size() != 2) throw std::runtime_error("config: tiles must be [tiles_x, tiles_y]");
        cfg.session.clahe_params.tiles_x = t[0].get<int>();
        cfg.session.clahe_params.tiles_y = t[1].get<int>();
    }
    if (j.contains("gt_dir")) cfg.gt_dir = resolve_path(base, require_string("gt_dir"));
    if (j.contains("surrogate_sharpness")) {
        cfg.surrogate_sharpness = j["surrogate_sharpness"].get<std::vector<double>>();
        if (cfg.surrogate_sharpness.empty()) {
            throw std::runtime_error("config: surrogate_sharpness must be non-empty");
        }
    }

    if (j.contains("ids")) {
        cfg.session.ids = j["ids"].get<std::vector<std::string>>();
        std::sort(cfg.session.ids.begin(), cfg.session.ids.end());
    } else {
        cfg.session.ids = list_image_ids(cfg.session.images_dir);
    }
    if (cfg.session.ids.empty()) throw std::runtime_error("config: no image ids");

    for (const std::string& id : cfg.session.ids) {
        const fs::path p = points_dir / (id + ".json");
        if (!fs::exists(p)) throw std::runtime_error("points file not found: " + p.string());
        cfg.session.points[id] = read_points_json(p);
    }
    return cfg;
}

} // namespace dept
