#include "sgnav.h"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sgnav/errors.hpp"
#include "sgnav/evaluation.hpp"
#include "sgnav/grouping.hpp"
#include "sgnav/io.hpp"
#include "sgnav/model.hpp"
#include "sgnav/navigation.hpp"
#include "sgnav/predictors.hpp"
#include "sgnav/version.hpp"
#include "sgnav/windows.hpp"

struct sgnav_scene {
  sgnav::Scene scene;
  std::vector<std::string> warnings;
  std::optional<sgnav::Grouping> truth;  // spawn-time partition of synthesized scenes
};

struct sgnav_model {
  sgnav::ModelConfig config;
  sgnav::ParameterSet params;
};

namespace {

using nlohmann::json;

thread_local std::string t_last_error;

// Exceptions stop at this boundary and become status codes. Most-derived
// types first; anything unanticipated reports as internal.
template <typename Fn>
sgnav_status guarded(Fn&& fn) {
  try {
    fn();
    return SGNAV_OK;
  } catch (const sgnav::TrainDivergedError& e) {
    t_last_error = e.what();
    return SGNAV_ERR_TRAIN_DIVERGED;
  } catch (const sgnav::NoWindowsError& e) {
    t_last_error = e.what();
    return SGNAV_ERR_NO_WINDOWS;
  } catch (const sgnav::ParseError& e) {
    t_last_error = e.what();
    return SGNAV_ERR_PARSE;
  } catch (const sgnav::IoError& e) {
    t_last_error = e.what();
    return SGNAV_ERR_IO;
  } catch (const std::invalid_argument& e) {
    t_last_error = e.what();
    return SGNAV_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return SGNAV_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return SGNAV_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string(what) + " must not be null");
}

// Parses an options string against the keys a call accepts, so misspelled
// options fail instead of silently applying defaults.
json parse_options(const char* options_json, std::initializer_list<const char*> allowed) {
  if (options_json == nullptr || *options_json == '\0') return json::object();
  json doc;
  try {
    doc = json::parse(options_json);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("options are not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("options must be a JSON object");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) throw std::invalid_argument("unknown option '" + key + "'");
  return doc;
}

double opt_double(const json& opts, const char* key, double fallback) {
  auto it = opts.find(key);
  if (it == opts.end()) return fallback;
  if (!it->is_number()) throw std::invalid_argument(std::string(key) + " must be a number");
  return it->get<double>();
}

int opt_int(const json& opts, const char* key, int fallback) {
  auto it = opts.find(key);
  if (it == opts.end()) return fallback;
  if (!it->is_number_integer())
    throw std::invalid_argument(std::string(key) + " must be an integer");
  return it->get<int>();
}

std::uint64_t opt_seed(const json& opts, const char* key, std::uint64_t fallback) {
  auto it = opts.find(key);
  if (it == opts.end()) return fallback;
  if (!it->is_number_integer() || (!it->is_number_unsigned() && it->get<std::int64_t>() < 0))
    throw std::invalid_argument(std::string(key) + " must be a nonnegative integer");
  return it->get<std::uint64_t>();
}

bool opt_bool(const json& opts, const char* key, bool fallback) {
  auto it = opts.find(key);
  if (it == opts.end()) return fallback;
  if (!it->is_boolean()) throw std::invalid_argument(std::string(key) + " must be a bool");
  return it->get<bool>();
}

std::string opt_string(const json& opts, const char* key, const std::string& fallback) {
  auto it = opts.find(key);
  if (it == opts.end()) return fallback;
  if (!it->is_string()) throw std::invalid_argument(std::string(key) + " must be a string");
  return it->get<std::string>();
}

constexpr int kDefaultStride = 12;  // model step every 12 frames (0.4 s at 30 fps)

sgnav::GroupingConfig grouping_config_from(const json& opts) {
  sgnav::GroupingConfig cfg;
  cfg.max_pair_distance = opt_double(opts, "max_pair_distance", cfg.max_pair_distance);
  cfg.max_speed_diff = opt_double(opts, "max_speed_diff", cfg.max_speed_diff);
  cfg.max_heading_diff = opt_double(opts, "max_heading_diff", cfg.max_heading_diff);
  cfg.min_persist_steps = opt_int(opts, "min_persist_steps", cfg.min_persist_steps);
  cfg.validate();
  return cfg;
}

sgnav::ModelConfig model_config_from(const json& opts, sgnav::PredictorKind kind) {
  sgnav::ModelConfig cfg;
  cfg.kind = kind;
  cfg.embedding_dim = opt_int(opts, "embedding_dim", cfg.embedding_dim);
  cfg.hidden_dim = opt_int(opts, "hidden_dim", cfg.hidden_dim);
  cfg.grid_cells = opt_int(opts, "grid_cells", cfg.grid_cells);
  cfg.grid_extent = opt_double(opts, "grid_extent", cfg.grid_extent);
  cfg.validate();
  return cfg;
}

// Resolves the "grouping" option to a fixed scene-level partition. "auto"
// clusters every step and keeps the persistent pairs.
sgnav::Grouping resolve_fixed_grouping(const sgnav_scene& handle, const std::string& mode,
                                       const json& opts, int stride) {
  if (mode == "truth") {
    if (!handle.truth)
      throw std::invalid_argument("grouping=truth needs a synthesized scene");
    return *handle.truth;
  }
  if (mode == "annotation") {
    const std::string path = opt_string(opts, "groups_path", "");
    if (path.empty())
      throw std::invalid_argument("grouping=annotation needs groups_path");
    const auto per_frame = sgnav::annotation_groupings(sgnav::load_group_annotation(path));
    if (per_frame.empty()) throw std::invalid_argument("annotation file has no frames");
    if (per_frame.size() != 1)
      throw std::invalid_argument(
          "a per-frame annotation cannot serve as one fixed grouping here");
    return per_frame.begin()->second;
  }
  if (mode == "auto") {
    const auto cfg = grouping_config_from(opts);
    return sgnav::persist_groups(sgnav::per_step_groupings(handle.scene, cfg, stride), cfg);
  }
  throw std::invalid_argument("unknown grouping mode '" + mode + "'");
}

// Training/prediction windows for a predictor kind. Only the group-entity
// kind consumes non-singleton partitions.
std::vector<sgnav::WindowBatch> batches_for(const sgnav_scene& handle,
                                            sgnav::PredictorKind kind, const json& opts,
                                            int stride) {
  if (kind != sgnav::PredictorKind::kSocialGroupLstm)
    return sgnav::singleton_window_batches(handle.scene, stride);

  const std::string fallback = handle.truth ? "truth" : "auto";
  const std::string mode = opt_string(opts, "grouping", fallback);
  if (mode == "singleton") return sgnav::singleton_window_batches(handle.scene, stride);
  if (mode == "auto")
    return sgnav::grouped_window_batches(handle.scene, grouping_config_from(opts), stride);
  if (mode == "truth") {
    if (!handle.truth)
      throw std::invalid_argument("grouping=truth needs a synthesized scene");
    return sgnav::fixed_grouping_window_batches(handle.scene, *handle.truth, stride);
  }
  if (mode == "annotation") {
    const std::string path = opt_string(opts, "groups_path", "");
    if (path.empty())
      throw std::invalid_argument("grouping=annotation needs groups_path");
    const auto per_frame = sgnav::annotation_groupings(sgnav::load_group_annotation(path));
    if (per_frame.empty()) throw std::invalid_argument("annotation file has no frames");
    if (per_frame.size() == 1)  // one frame = a time-invariant partition
      return sgnav::fixed_grouping_window_batches(handle.scene, per_frame.begin()->second,
                                                  stride);
    return sgnav::annotated_window_batches(handle.scene, per_frame,
                                           grouping_config_from(opts), stride);
  }
  throw std::invalid_argument("unknown grouping mode '" + mode + "'");
}

// Static-storage spelling of a kind, safe to hand across the C boundary.
const char* kind_token(sgnav::PredictorKind kind) {
  switch (kind) {
    case sgnav::PredictorKind::kLinear:
      return "linear";
    case sgnav::PredictorKind::kVanillaLstm:
      return "vanilla_lstm";
    case sgnav::PredictorKind::kOccupancyLstm:
      return "o_lstm";
    case sgnav::PredictorKind::kSocialLstm:
      return "s_lstm";
    case sgnav::PredictorKind::kSocialGroupLstm:
      return "sg_lstm";
  }
  return "unknown";
}

}  // namespace

extern "C" {

const char* sgnav_version(void) { return sgnav::kVersion; }

const char* sgnav_last_error(void) { return t_last_error.c_str(); }

const char* sgnav_status_name(sgnav_status status) {
  switch (status) {
    case SGNAV_OK:
      return "ok";
    case SGNAV_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case SGNAV_ERR_PARSE:
      return "parse";
    case SGNAV_ERR_IO:
      return "io";
    case SGNAV_ERR_NO_WINDOWS:
      return "no_windows";
    case SGNAV_ERR_TRAIN_DIVERGED:
      return "train_diverged";
    case SGNAV_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

void sgnav_scene_free(sgnav_scene* scene) { delete scene; }

void sgnav_model_free(sgnav_model* model) { delete model; }

sgnav_status sgnav_scene_load(const char* path, const char* format, const char* camera_path,
                              const char* depth_path, sgnav_scene** out_scene) {
  return guarded([&] {
    require(path, "path");
    require(format, "format");
    require(out_scene, "out_scene");
    std::optional<sgnav::CameraModel> camera;
    std::optional<sgnav::DepthGrid> depth;
    if (camera_path && *camera_path) camera = sgnav::load_camera(camera_path);
    if (depth_path && *depth_path) depth = sgnav::load_depth(depth_path);
    sgnav::LoadReport report = sgnav::load_trajectories(path, format, camera, depth);
    auto handle = std::make_unique<sgnav_scene>();
    handle->scene = std::move(report.scene);
    handle->warnings = std::move(report.warnings);
    *out_scene = handle.release();
  });
}

sgnav_status sgnav_scene_save_jsonl(const sgnav_scene* scene, const char* path) {
  return guarded([&] {
    require(scene, "scene");
    require(path, "path");
    sgnav::save_jsonl(path, scene->scene);
  });
}

int sgnav_scene_pedestrian_count(const sgnav_scene* scene) {
  return scene ? static_cast<int>(scene->scene.tracks.size()) : 0;
}

long long sgnav_scene_frame_count(const sgnav_scene* scene) {
  return scene ? static_cast<long long>(scene->scene.frames.size()) : 0;
}

int sgnav_scene_warning_count(const sgnav_scene* scene) {
  return scene ? static_cast<int>(scene->warnings.size()) : 0;
}

const char* sgnav_scene_warning(const sgnav_scene* scene, int index) {
  if (!scene || index < 0 || index >= static_cast<int>(scene->warnings.size()))
    return nullptr;
  return scene->warnings[static_cast<std::size_t>(index)].c_str();
}

sgnav_status sgnav_synthesize(const char* options_json, sgnav_scene** out_scene) {
  return guarded([&] {
    require(out_scene, "out_scene");
    const json opts = parse_options(
        options_json,
        {"pedestrians", "group_size_weights", "speed_min", "speed_max", "jitter_sigma",
         "path", "arc_curvature", "duration_steps", "frame_stride", "area_half_width",
         "seed"});
    sgnav::SynthConfig cfg;
    cfg.pedestrians = opt_int(opts, "pedestrians", cfg.pedestrians);
    if (auto it = opts.find("group_size_weights"); it != opts.end()) {
      if (!it->is_array()) throw std::invalid_argument("group_size_weights must be an array");
      cfg.group_size_weights = it->get<std::vector<double>>();
    }
    cfg.speed_min = opt_double(opts, "speed_min", cfg.speed_min);
    cfg.speed_max = opt_double(opts, "speed_max", cfg.speed_max);
    cfg.jitter_sigma = opt_double(opts, "jitter_sigma", cfg.jitter_sigma);
    const std::string path = opt_string(opts, "path", "straight");
    if (path == "straight")
      cfg.path = sgnav::SynthConfig::Path::kStraight;
    else if (path == "arc")
      cfg.path = sgnav::SynthConfig::Path::kArc;
    else
      throw std::invalid_argument("path must be 'straight' or 'arc'");
    cfg.arc_curvature = opt_double(opts, "arc_curvature", cfg.arc_curvature);
    cfg.duration_steps = opt_int(opts, "duration_steps", cfg.duration_steps);
    cfg.frame_stride = opt_int(opts, "frame_stride", static_cast<int>(cfg.frame_stride));
    cfg.area_half_width = opt_double(opts, "area_half_width", cfg.area_half_width);
    cfg.seed = opt_seed(opts, "seed", cfg.seed);

    sgnav::SynthResult result = sgnav::synthesize(cfg);
    auto handle = std::make_unique<sgnav_scene>();
    handle->scene = std::move(result.scene);
    handle->truth = std::move(result.grouping);
    *out_scene = handle.release();
  });
}

int sgnav_scene_has_truth_grouping(const sgnav_scene* scene) {
  return scene && scene->truth ? 1 : 0;
}

sgnav_status sgnav_scene_save_truth_groups(const sgnav_scene* scene, const char* path,
                                           const char* invocation) {
  return guarded([&] {
    require(scene, "scene");
    require(path, "path");
    require(invocation, "invocation");
    if (!scene->truth)
      throw std::invalid_argument("scene carries no ground-truth grouping");
    std::map<sgnav::FrameId, sgnav::Grouping> one;
    one.emplace(scene->truth->window_start_frame, *scene->truth);
    sgnav::save_group_annotation(path, sgnav::annotation_from_groupings(one), invocation);
  });
}

sgnav_status sgnav_detect_groups(const sgnav_scene* scene, const char* options_json,
                                 const char* out_path, const char* invocation) {
  return guarded([&] {
    require(scene, "scene");
    require(out_path, "out_path");
    require(invocation, "invocation");
    const json opts =
        parse_options(options_json, {"stride", "max_pair_distance", "max_speed_diff",
                                     "max_heading_diff", "min_persist_steps"});
    const int stride = opt_int(opts, "stride", kDefaultStride);
    const auto cfg = grouping_config_from(opts);
    const auto per_step = sgnav::per_step_groupings(scene->scene, cfg, stride);
    std::map<sgnav::FrameId, sgnav::Grouping> per_frame;
    for (const sgnav::Grouping& g : per_step) per_frame.emplace(g.window_start_frame, g);
    sgnav::save_group_annotation(out_path, sgnav::annotation_from_groupings(per_frame),
                                 invocation);
  });
}

sgnav_status sgnav_grouping_recovery(const char* detected_path, const char* truth_path,
                                     const char* csv_path, const char* invocation,
                                     int* out_compared, int* out_matched, double* out_rate) {
  return guarded([&] {
    require(detected_path, "detected_path");
    require(truth_path, "truth_path");
    const auto detected =
        sgnav::annotation_groupings(sgnav::load_group_annotation(detected_path));
    const auto truth = sgnav::annotation_groupings(sgnav::load_group_annotation(truth_path));
    const sgnav::RecoveryReport report = sgnav::grouping_recovery(detected, truth);
    if (csv_path && *csv_path) {
      require(invocation, "invocation");
      sgnav::write_recovery_csv(csv_path, report, invocation);
    }
    if (out_compared) *out_compared = report.frames_compared;
    if (out_matched) *out_matched = report.frames_matched;
    if (out_rate) *out_rate = report.rate;
  });
}

sgnav_status sgnav_model_load(const char* path, sgnav_model** out_model) {
  return guarded([&] {
    require(path, "path");
    require(out_model, "out_model");
    sgnav::LoadedModel loaded = sgnav::load_model(path);
    *out_model = new sgnav_model{loaded.config, std::move(loaded.params)};
  });
}

sgnav_status sgnav_model_save(const sgnav_model* model, const char* path,
                              const char* invocation) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    require(invocation, "invocation");
    sgnav::save_model(path, model->config, model->params, invocation);
  });
}

const char* sgnav_model_kind(const sgnav_model* model) {
  return model ? kind_token(model->config.kind) : nullptr;
}

sgnav_status sgnav_train(const sgnav_scene* scene, const char* options_json,
                         const char* model_path, const char* loss_csv_path,
                         const char* invocation, sgnav_model** out_model) {
  return guarded([&] {
    require(scene, "scene");
    require(invocation, "invocation");
    const json opts = parse_options(
        options_json,
        {"kind", "stride", "embedding_dim", "hidden_dim", "grid_cells", "grid_extent",
         "epochs", "batch_size", "lr", "clip_norm", "seed", "grouping", "groups_path",
         "max_pair_distance", "max_speed_diff", "max_heading_diff", "min_persist_steps"});
    const auto kind =
        sgnav::predictor_kind_from_string(opt_string(opts, "kind", "sg_lstm"));
    if (kind == sgnav::PredictorKind::kLinear)
      throw std::invalid_argument("the linear baseline has nothing to train");
    const sgnav::ModelConfig cfg = model_config_from(opts, kind);
    const int stride = opt_int(opts, "stride", kDefaultStride);

    sgnav::TrainConfig tc;
    tc.epochs = opt_int(opts, "epochs", tc.epochs);
    tc.batch_size = opt_int(opts, "batch_size", tc.batch_size);
    tc.lr = opt_double(opts, "lr", tc.lr);
    tc.clip_norm = opt_double(opts, "clip_norm", tc.clip_norm);
    tc.seed = opt_seed(opts, "seed", tc.seed);

    const auto data = batches_for(*scene, kind, opts, stride);
    sgnav::TrainResult result = sgnav::train(cfg, data, tc);

    if (model_path && *model_path)
      sgnav::save_model(model_path, cfg, result.params, invocation);
    if (loss_csv_path && *loss_csv_path)
      sgnav::write_loss_csv(loss_csv_path, result.epoch_mean_nll, invocation);
    if (out_model) *out_model = new sgnav_model{cfg, std::move(result.params)};
  });
}

sgnav_status sgnav_predict(const sgnav_scene* scene, const sgnav_model* model,
                           const char* options_json, const char* csv_path,
                           const char* invocation) {
  return guarded([&] {
    require(scene, "scene");
    require(csv_path, "csv_path");
    require(invocation, "invocation");
    const json opts = parse_options(
        options_json, {"kind", "stride", "grouping", "groups_path", "max_pair_distance",
                       "max_speed_diff", "max_heading_diff", "min_persist_steps"});
    const int stride = opt_int(opts, "stride", kDefaultStride);

    sgnav::ModelConfig cfg;
    sgnav::ParameterSet params;
    if (model) {
      cfg = model->config;
      params = model->params;
      const std::string kind = opt_string(opts, "kind", "");
      if (!kind.empty() && sgnav::predictor_kind_from_string(kind) != cfg.kind)
        throw std::invalid_argument("kind option contradicts the model's kind");
    } else {
      cfg.kind = sgnav::predictor_kind_from_string(opt_string(opts, "kind", "linear"));
      if (cfg.kind != sgnav::PredictorKind::kLinear)
        throw std::invalid_argument("a learned predictor needs a model");
    }

    std::vector<sgnav::PredictionRow> rows;
    for (const sgnav::WindowBatch& batch : batches_for(*scene, cfg.kind, opts, stride)) {
      const auto horizons = sgnav::predict_batch(cfg, params, batch);
      const auto batch_rows = sgnav::prediction_rows(scene->scene, stride, batch, horizons);
      rows.insert(rows.end(), batch_rows.begin(), batch_rows.end());
    }
    sgnav::write_predictions_csv(csv_path, rows, invocation);
  });
}

sgnav_status sgnav_evaluate(const sgnav_scene* scene, const char* predictions_path,
                            const char* options_json, const char* csv_path,
                            const char* invocation, double* out_ade, double* out_fde) {
  return guarded([&] {
    require(scene, "scene");
    require(predictions_path, "predictions_path");
    const json opts = parse_options(options_json, {"stride", "squared"});
    const int stride = opt_int(opts, "stride", kDefaultStride);
    const bool squared = opt_bool(opts, "squared", false);

    const auto rows = sgnav::read_predictions_csv(predictions_path);
    const auto windows = sgnav::to_person_windows(rows);
    const sgnav::MetricReport report =
        sgnav::evaluate(scene->scene, stride, windows, squared);
    if (csv_path && *csv_path) {
      require(invocation, "invocation");
      sgnav::write_metrics_csv(csv_path, report, invocation);
    }
    if (out_ade) *out_ade = report.ade;
    if (out_fde) *out_fde = report.fde;
  });
}

sgnav_status sgnav_bench(const sgnav_scene* scene, const char* options_json,
                         const char* csv_path, const char* invocation) {
  return guarded([&] {
    require(scene, "scene");
    require(csv_path, "csv_path");
    require(invocation, "invocation");
    const json opts = parse_options(
        options_json,
        {"stride", "warmup", "repetitions", "seed", "embedding_dim", "hidden_dim",
         "grid_cells", "grid_extent", "grouping", "groups_path", "max_pair_distance",
         "max_speed_diff", "max_heading_diff", "min_persist_steps"});
    const int stride = opt_int(opts, "stride", kDefaultStride);
    const std::uint64_t seed = opt_seed(opts, "seed", 0);

    sgnav::BenchConfig bc;
    bc.warmup = opt_int(opts, "warmup", bc.warmup);
    bc.repetitions = opt_int(opts, "repetitions", bc.repetitions);

    const std::string fallback = scene->truth ? "truth" : "auto";
    const sgnav::Grouping grouping =
        resolve_fixed_grouping(*scene, opt_string(opts, "grouping", fallback), opts, stride);

    // Row order of the runtime table.
    const sgnav::PredictorKind order[] = {
        sgnav::PredictorKind::kLinear, sgnav::PredictorKind::kSocialLstm,
        sgnav::PredictorKind::kOccupancyLstm, sgnav::PredictorKind::kVanillaLstm,
        sgnav::PredictorKind::kSocialGroupLstm};
    std::vector<sgnav::BenchMethod> methods;
    for (const sgnav::PredictorKind kind : order) {
      sgnav::BenchMethod method;
      method.config = model_config_from(opts, kind);
      if (kind != sgnav::PredictorKind::kLinear)
        method.params = sgnav::init_parameters(method.config, seed);
      methods.push_back(std::move(method));
    }

    const sgnav::BenchReport report = sgnav::bench(methods, scene->scene, grouping, stride, bc);
    sgnav::write_bench_csv(csv_path, report, invocation);
  });
}

sgnav_status sgnav_simulate(const char* scenario_path, const char* options_json,
                            const char* trace_csv_path, const char* svg_path,
                            const char* invocation, int* out_outcome, int* out_steps,
                            double* out_path_length) {
  return guarded([&] {
    require(scenario_path, "scenario_path");
    const json opts = parse_options(options_json, {"max_steps"});
    sgnav::Scenario scenario = sgnav::load_scenario(scenario_path);
    if (opts.contains("max_steps")) {
      scenario.max_steps = opt_int(opts, "max_steps", scenario.max_steps);
      scenario.validate();
    }

    const sgnav::SimResult result = sgnav::simulate(scenario);
    if (trace_csv_path && *trace_csv_path) {
      require(invocation, "invocation");
      sgnav::write_trace_csv(trace_csv_path, result, invocation);
    }
    if (svg_path && *svg_path) {
      require(invocation, "invocation");
      sgnav::write_trace_svg(svg_path, result, scenario.scene, invocation);
    }
    if (out_outcome) {
      switch (result.outcome) {
        case sgnav::SimOutcome::kGoalReached:
          *out_outcome = 0;
          break;
        case sgnav::SimOutcome::kCollision:
          *out_outcome = 1;
          break;
        case sgnav::SimOutcome::kStepCap:
          *out_outcome = 2;
          break;
      }
    }
    if (out_steps) *out_steps = static_cast<int>(result.trace.size());
    if (out_path_length) *out_path_length = result.path_length;
  });
}

const char* sgnav_outcome_name(int outcome) {
  switch (outcome) {
    case 0:
      return "goal_reached";
    case 1:
      return "collision";
    case 2:
      return "step_cap";
    default:
      return "unknown";
  }
}

}  // extern "C"
