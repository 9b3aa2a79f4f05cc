// Command-line front end. Everything of substance happens behind the C API in
// libsgnav; this file only maps flags to options JSON, reports errors, and
// prints summaries.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgnav.h"

namespace {

using nlohmann::json;

// A released scene/model handle on every path out of a subcommand.
struct SceneHandle {
  sgnav_scene* ptr = nullptr;
  ~SceneHandle() { sgnav_scene_free(ptr); }
};
struct ModelHandle {
  sgnav_model* ptr = nullptr;
  ~ModelHandle() { sgnav_model_free(ptr); }
};

// One machine-readable line per failure, then the status as exit code.
int fail(sgnav_status status) {
  std::cerr << "error: " << sgnav_status_name(status) << ": " << sgnav_last_error() << '\n';
  return static_cast<int>(status);
}

void print_warnings(const sgnav_scene* scene) {
  for (int i = 0; i < sgnav_scene_warning_count(scene); ++i)
    std::cerr << "warning: " << sgnav_scene_warning(scene, i) << '\n';
}

// `--config`: a flat JSON object whose keys are long flag names (no dashes
// prefix), e.g. {"seed": 7, "jitter-sigma": 0.1}. Values given on the command
// line win over the file; the file wins over built-in defaults.
//
// CLI11 only reads config files on the root app, so the option lives there
// (subcommands pass it up via fallthrough) and the items produced here name
// the parsed subcommand as their parent to land on its flags.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json doc;
    try {
      input >> doc;
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConfigError("config must be a flat JSON object");

    std::vector<std::string> parents;
    const auto parsed = root_->get_subcommands();
    if (!parsed.empty()) parents.push_back(parsed.front()->get_name());

    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const json& v : value)
          item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else if (value.is_string()) {
        item.inputs.push_back(value.get<std::string>());
      } else {
        item.inputs.push_back(value.dump());
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  const CLI::App* root_;
};

void add_config_flag(CLI::App* sub) {
  sub->fallthrough();  // lets `<sub> --config file` reach the root option
}

// Options shared by every subcommand that reads a scene.
struct SceneArgs {
  std::string input;
  std::string format = "jsonl";
  std::string camera;
  std::string depth;
};

void add_scene_args(CLI::App* sub, SceneArgs& args) {
  sub->add_option("--input", args.input, "trajectory file")->required();
  sub->add_option("--format", args.format, "ethucy | mot15 | jsonl")
      ->capture_default_str();
  sub->add_option("--camera", args.camera, "camera intrinsics JSON (mot15 bbox fallback)");
  sub->add_option("--depth", args.depth, "depth grid, .pgm or CSV (mot15 bbox fallback)");
}

sgnav_status load_scene(const SceneArgs& args, SceneHandle& scene) {
  const sgnav_status status = sgnav_scene_load(
      args.input.c_str(), args.format.c_str(), args.camera.empty() ? nullptr : args.camera.c_str(),
      args.depth.empty() ? nullptr : args.depth.c_str(), &scene.ptr);
  if (status == SGNAV_OK) print_warnings(scene.ptr);
  return status;
}

// Group-detector knobs, reused wherever a grouping can be configured.
struct GroupingArgs {
  int stride = 12;
  double max_pair_distance = 2.0;
  double max_speed_diff = 0.5;
  double max_heading_diff = 0.5236;
  int min_persist_steps = 3;
};

void add_grouping_args(CLI::App* sub, GroupingArgs& args) {
  sub->add_option("--stride", args.stride, "frames per model step")->capture_default_str();
  sub->add_option("--max-pair-distance", args.max_pair_distance, "meters")
      ->capture_default_str();
  sub->add_option("--max-speed-diff", args.max_speed_diff, "m/s")->capture_default_str();
  sub->add_option("--max-heading-diff", args.max_heading_diff, "radians")
      ->capture_default_str();
  sub->add_option("--min-persist-steps", args.min_persist_steps,
                  "steps a pair must stay linked")
      ->capture_default_str();
}

void put_grouping(json& opts, const GroupingArgs& args) {
  opts["stride"] = args.stride;
  opts["max_pair_distance"] = args.max_pair_distance;
  opts["max_speed_diff"] = args.max_speed_diff;
  opts["max_heading_diff"] = args.max_heading_diff;
  opts["min_persist_steps"] = args.min_persist_steps;
}

// Model architecture knobs shared by train and bench.
struct ModelDims {
  int embedding_dim = 32;
  int hidden_dim = 64;
  int grid_cells = 4;
  double grid_extent = 4.0;
};

void add_model_dims(CLI::App* sub, ModelDims& dims) {
  sub->add_option("--embedding-dim", dims.embedding_dim)->capture_default_str();
  sub->add_option("--hidden-dim", dims.hidden_dim)->capture_default_str();
  sub->add_option("--grid-cells", dims.grid_cells, "cells per grid side")
      ->capture_default_str();
  sub->add_option("--grid-extent", dims.grid_extent, "grid half-size, meters")
      ->capture_default_str();
}

void put_model_dims(json& opts, const ModelDims& dims) {
  opts["embedding_dim"] = dims.embedding_dim;
  opts["hidden_dim"] = dims.hidden_dim;
  opts["grid_cells"] = dims.grid_cells;
  opts["grid_extent"] = dims.grid_extent;
}

void echo_file(const std::string& path) {
  std::ifstream in(path);
  std::cout << in.rdbuf();
}

std::string join_invocation(int argc, char** argv) {
  std::string out = std::filesystem::path(argv[0]).filename().string();
  for (int i = 1; i < argc; ++i) {
    out += ' ';
    out += argv[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string invocation = join_invocation(argc, argv);

  CLI::App app{"group-aware pedestrian trajectory prediction and navigation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("sgnav ") + sgnav_version());
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "flat JSON file of defaults for the subcommand's flags");
  app.allow_config_extras(CLI::config_extras_mode::error);

  // ------------------------------------------------------------- convert --
  auto* convert = app.add_subcommand("convert", "re-encode trajectories as JSON Lines");
  SceneArgs convert_scene;
  std::string convert_out;
  add_scene_args(convert, convert_scene);
  convert->get_option("--format")->required();
  convert->add_option("--output", convert_out, "jsonl file to write")->required();
  add_config_flag(convert);
  convert->callback([&]() -> void {
    SceneHandle scene;
    sgnav_status status = load_scene(convert_scene, scene);
    if (status == SGNAV_OK) status = sgnav_scene_save_jsonl(scene.ptr, convert_out.c_str());
    if (status != SGNAV_OK) std::exit(fail(status));
    std::cout << "wrote " << convert_out << " (" << sgnav_scene_pedestrian_count(scene.ptr)
              << " pedestrians, " << sgnav_scene_frame_count(scene.ptr) << " frames)\n";
  });

  // --------------------------------------------------------------- group --
  auto* group = app.add_subcommand("group", "detect walking groups per model step");
  SceneArgs group_scene;
  GroupingArgs group_args;
  std::string group_out;
  add_scene_args(group, group_scene);
  add_grouping_args(group, group_args);
  group->add_option("--output", group_out, "group annotation JSON to write")->required();
  add_config_flag(group);
  group->callback([&]() -> void {
    SceneHandle scene;
    sgnav_status status = load_scene(group_scene, scene);
    if (status == SGNAV_OK) {
      json opts;
      put_grouping(opts, group_args);
      status = sgnav_detect_groups(scene.ptr, opts.dump().c_str(), group_out.c_str(),
                                   invocation.c_str());
    }
    if (status != SGNAV_OK) std::exit(fail(status));
    std::cout << "wrote " << group_out << '\n';
  });

  // --------------------------------------------------------------- synth --
  auto* synth = app.add_subcommand("synth", "generate a synthetic group-structured scene");
  std::string synth_out;
  std::string synth_groups_out;
  std::string synth_path = "straight";
  std::vector<double> synth_weights = {0.5, 0.3, 0.2};
  int synth_peds = 20;
  double synth_speed_min = 0.8, synth_speed_max = 1.4, synth_jitter = 0.05;
  double synth_curvature = 0.05, synth_half_width = 10.0;
  int synth_duration = 30, synth_frame_stride = 12;
  std::uint64_t synth_seed = 0;
  synth->add_option("--output", synth_out, "jsonl scene to write")->required();
  synth->add_option("--groups-out", synth_groups_out,
                    "also write the ground-truth groups as annotation JSON");
  synth->add_option("--pedestrians", synth_peds)->capture_default_str();
  synth->add_option("--group-size-weights", synth_weights,
                    "relative weights of sizes 1, 2, 3, ...");
  synth->add_option("--speed-min", synth_speed_min, "m/s")->capture_default_str();
  synth->add_option("--speed-max", synth_speed_max, "m/s")->capture_default_str();
  synth->add_option("--jitter-sigma", synth_jitter, "per-member noise, meters")
      ->capture_default_str();
  synth->add_option("--path", synth_path, "straight | arc")->capture_default_str();
  synth->add_option("--arc-curvature", synth_curvature, "1/m")->capture_default_str();
  synth->add_option("--duration-steps", synth_duration)->capture_default_str();
  synth->add_option("--frame-stride", synth_frame_stride, "frame ids per model step")
      ->capture_default_str();
  synth->add_option("--area-half-width", synth_half_width, "spawn square half-size, meters")
      ->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  add_config_flag(synth);
  synth->callback([&]() -> void {
    json opts{{"pedestrians", synth_peds},
              {"group_size_weights", synth_weights},
              {"speed_min", synth_speed_min},
              {"speed_max", synth_speed_max},
              {"jitter_sigma", synth_jitter},
              {"path", synth_path},
              {"arc_curvature", synth_curvature},
              {"duration_steps", synth_duration},
              {"frame_stride", synth_frame_stride},
              {"area_half_width", synth_half_width},
              {"seed", synth_seed}};
    SceneHandle scene;
    sgnav_status status = sgnav_synthesize(opts.dump().c_str(), &scene.ptr);
    if (status == SGNAV_OK) status = sgnav_scene_save_jsonl(scene.ptr, synth_out.c_str());
    if (status == SGNAV_OK && !synth_groups_out.empty())
      status = sgnav_scene_save_truth_groups(scene.ptr, synth_groups_out.c_str(),
                                             invocation.c_str());
    if (status != SGNAV_OK) std::exit(fail(status));
    std::cout << "wrote " << synth_out << " (" << sgnav_scene_pedestrian_count(scene.ptr)
              << " pedestrians, " << sgnav_scene_frame_count(scene.ptr) << " frames)\n";
    if (!synth_groups_out.empty()) std::cout << "wrote " << synth_groups_out << '\n';
  });

  // --------------------------------------------------------------- train --
  auto* train = app.add_subcommand("train", "fit a predictor on a scene");
  SceneArgs train_scene;
  GroupingArgs train_grouping;
  ModelDims train_dims;
  std::string train_kind = "sg_lstm";
  std::string train_model_out;
  std::string train_loss_out;
  std::string train_grouping_mode;
  std::string train_groups_path;
  int train_epochs = 200, train_batch = 16;
  double train_lr = 1e-3, train_clip = 10.0;
  std::uint64_t train_seed = 0;
  add_scene_args(train, train_scene);
  add_grouping_args(train, train_grouping);
  add_model_dims(train, train_dims);
  train->add_option("--kind", train_kind, "vanilla_lstm | o_lstm | s_lstm | sg_lstm")
      ->capture_default_str();
  train->add_option("--model-out", train_model_out, "model JSON to write")->required();
  train->add_option("--loss-out", train_loss_out, "per-epoch loss CSV to write");
  train->add_option("--epochs", train_epochs)->capture_default_str();
  train->add_option("--batch-size", train_batch, "window batches per gradient step")
      ->capture_default_str();
  train->add_option("--lr", train_lr)->capture_default_str();
  train->add_option("--clip-norm", train_clip, "global gradient norm cap")
      ->capture_default_str();
  train->add_option("--seed", train_seed)->capture_default_str();
  train->add_option("--grouping", train_grouping_mode,
                    "auto | annotation | singleton (group-entity kind only)");
  train->add_option("--groups", train_groups_path, "annotation JSON for --grouping annotation");
  add_config_flag(train);
  train->callback([&]() -> void {
    SceneHandle scene;
    sgnav_status status = load_scene(train_scene, scene);
    if (status == SGNAV_OK) {
      json opts{{"kind", train_kind}, {"epochs", train_epochs}, {"batch_size", train_batch},
                {"lr", train_lr},     {"clip_norm", train_clip}, {"seed", train_seed}};
      put_grouping(opts, train_grouping);
      put_model_dims(opts, train_dims);
      if (!train_grouping_mode.empty()) opts["grouping"] = train_grouping_mode;
      if (!train_groups_path.empty()) {
        opts["groups_path"] = train_groups_path;
        if (train_grouping_mode.empty()) opts["grouping"] = "annotation";
      }
      status = sgnav_train(scene.ptr, opts.dump().c_str(), train_model_out.c_str(),
                           train_loss_out.empty() ? nullptr : train_loss_out.c_str(),
                           invocation.c_str(), nullptr);
    }
    if (status != SGNAV_OK) std::exit(fail(status));
    std::cout << "wrote " << train_model_out << '\n';
    if (!train_loss_out.empty()) std::cout << "wrote " << train_loss_out << '\n';
  });

  // ------------------------------------------------------------- predict --
  auto* predict = app.add_subcommand("predict", "predict every window of a scene");
  SceneArgs predict_scene;
  GroupingArgs predict_grouping;
  std::string predict_model_path;
  std::string predict_kind;
  std::string predict_out;
  std::string predict_grouping_mode;
  std::string predict_groups_path;
  add_scene_args(predict, predict_scene);
  add_grouping_args(predict, predict_grouping);
  predict->add_option("--model", predict_model_path, "model JSON (omit for --kind linear)");
  predict->add_option("--kind", predict_kind, "linear (when no model is given)");
  predict->add_option("--output", predict_out, "predictions CSV to write")->required();
  predict->add_option("--grouping", predict_grouping_mode,
                      "auto | annotation | singleton (group-entity kind only)");
  predict->add_option("--groups", predict_groups_path,
                      "annotation JSON for --grouping annotation");
  add_config_flag(predict);
  predict->callback([&]() -> void {
    SceneHandle scene;
    ModelHandle model;
    sgnav_status status = load_scene(predict_scene, scene);
    if (status == SGNAV_OK && !predict_model_path.empty())
      status = sgnav_model_load(predict_model_path.c_str(), &model.ptr);
    if (status == SGNAV_OK) {
      json opts;
      put_grouping(opts, predict_grouping);
      if (!predict_kind.empty()) opts["kind"] = predict_kind;
      if (!predict_grouping_mode.empty()) opts["grouping"] = predict_grouping_mode;
      if (!predict_groups_path.empty()) {
        opts["groups_path"] = predict_groups_path;
        if (predict_grouping_mode.empty()) opts["grouping"] = "annotation";
      }
      status = sgnav_predict(scene.ptr, model.ptr, opts.dump().c_str(), predict_out.c_str(),
                             invocation.c_str());
    }
    if (status != SGNAV_OK) std::exit(fail(status));
    std::cout << "wrote " << predict_out << '\n';
  });

  // ---------------------------------------------------------------- eval --
  auto* eval = app.add_subcommand(
      "eval", "score predictions against truth, or detected groups against labels");
  SceneArgs eval_scene;
  std::string eval_predictions;
  std::string eval_out;
  std::string eval_detected;
  std::string eval_truth;
  int eval_stride = 12;
  bool eval_squared = false;
  eval->add_option("--input", eval_scene.input, "trajectory file with ground truth");
  eval->add_option("--format", eval_scene.format, "ethucy | mot15 | jsonl")
      ->capture_default_str();
  eval->add_option("--camera", eval_scene.camera, "camera intrinsics JSON");
  eval->add_option("--depth", eval_scene.depth, "depth grid");
  eval->add_option("--predictions", eval_predictions, "predictions CSV to score");
  eval->add_option("--stride", eval_stride, "frames per model step")->capture_default_str();
  eval->add_flag("--squared", eval_squared, "report mean squared distances");
  eval->add_option("--detected", eval_detected, "detected-group annotation JSON");
  eval->add_option("--truth", eval_truth, "reference-group annotation JSON");
  eval->add_option("--output", eval_out, "report CSV to write");
  add_config_flag(eval);
  eval->callback([&]() -> void {
    if (!eval_detected.empty() || !eval_truth.empty()) {
      if (eval_detected.empty() || eval_truth.empty()) {
        std::cerr << "error: invalid_argument: grouping mode needs both --detected and "
                     "--truth\n";
        std::exit(static_cast<int>(SGNAV_ERR_INVALID_ARGUMENT));
      }
      int compared = 0, matched = 0;
      double rate = 0.0;
      const sgnav_status status = sgnav_grouping_recovery(
          eval_detected.c_str(), eval_truth.c_str(),
          eval_out.empty() ? nullptr : eval_out.c_str(), invocation.c_str(), &compared,
          &matched, &rate);
      if (status != SGNAV_OK) std::exit(fail(status));
      std::cout << "recovery " << rate << " (" << matched << "/" << compared
                << " frames)\n";
      if (!eval_out.empty()) std::cout << "wrote " << eval_out << '\n';
      return;
    }
    if (eval_scene.input.empty() || eval_predictions.empty()) {
      std::cerr << "error: invalid_argument: prediction mode needs --input and "
                   "--predictions\n";
      std::exit(static_cast<int>(SGNAV_ERR_INVALID_ARGUMENT));
    }
    SceneHandle scene;
    sgnav_status status = load_scene(eval_scene, scene);
    double ade = 0.0, fde = 0.0;
    if (status == SGNAV_OK) {
      const json opts{{"stride", eval_stride}, {"squared", eval_squared}};
      status = sgnav_evaluate(scene.ptr, eval_predictions.c_str(), opts.dump().c_str(),
                              eval_out.empty() ? nullptr : eval_out.c_str(),
                              invocation.c_str(), &ade, &fde);
    }
    if (status != SGNAV_OK) std::exit(fail(status));
    std::cout << "ADE " << ade << "  FDE " << fde
              << (eval_squared ? "  (squared)" : "") << '\n';
    if (!eval_out.empty()) std::cout << "wrote " << eval_out << '\n';
  });

  // --------------------------------------------------------------- bench --
  auto* bench = app.add_subcommand("bench", "time all five predictors on a scene");
  SceneArgs bench_scene;
  GroupingArgs bench_grouping;
  ModelDims bench_dims;
  std::string bench_out;
  std::string bench_grouping_mode;
  std::string bench_groups_path;
  int bench_warmup = 3, bench_reps = 11;
  std::uint64_t bench_seed = 0;
  add_scene_args(bench, bench_scene);
  add_grouping_args(bench, bench_grouping);
  add_model_dims(bench, bench_dims);
  bench->add_option("--output", bench_out, "runtime CSV to write")->required();
  bench->add_option("--warmup", bench_warmup, "untimed repetitions")->capture_default_str();
  bench->add_option("--repetitions", bench_reps, "timed repetitions (median reported)")
      ->capture_default_str();
  bench->add_option("--seed", bench_seed, "weight-initialization seed")
      ->capture_default_str();
  bench->add_option("--grouping", bench_grouping_mode, "auto | annotation");
  bench->add_option("--groups", bench_groups_path, "annotation JSON for --grouping annotation");
  add_config_flag(bench);
  bench->callback([&]() -> void {
    SceneHandle scene;
    sgnav_status status = load_scene(bench_scene, scene);
    if (status == SGNAV_OK) {
      json opts{{"warmup", bench_warmup}, {"repetitions", bench_reps}, {"seed", bench_seed}};
      put_grouping(opts, bench_grouping);
      put_model_dims(opts, bench_dims);
      if (!bench_grouping_mode.empty()) opts["grouping"] = bench_grouping_mode;
      if (!bench_groups_path.empty()) {
        opts["groups_path"] = bench_groups_path;
        if (bench_grouping_mode.empty()) opts["grouping"] = "annotation";
      }
      status = sgnav_bench(scene.ptr, opts.dump().c_str(), bench_out.c_str(),
                           invocation.c_str());
    }
    if (status != SGNAV_OK) std::exit(fail(status));
    echo_file(bench_out);
    std::cout << "wrote " << bench_out << '\n';
  });

  // ------------------------------------------------------------ simulate --
  auto* simulate = app.add_subcommand("simulate", "run a navigation scenario");
  std::string sim_scenario;
  std::string sim_trace;
  std::string sim_svg;
  int sim_max_steps = -1;
  simulate->add_option("--scenario", sim_scenario, "scenario JSON")->required();
  simulate->add_option("--trace", sim_trace, "trace CSV to write");
  simulate->add_option("--svg", sim_svg, "overhead-view SVG to write");
  simulate->add_option("--max-steps", sim_max_steps, "override the scenario's step cap");
  add_config_flag(simulate);
  simulate->callback([&]() -> void {
    json opts = json::object();
    if (sim_max_steps >= 0) opts["max_steps"] = sim_max_steps;
    int outcome = -1, steps = 0;
    double path_length = 0.0;
    const sgnav_status status = sgnav_simulate(
        sim_scenario.c_str(), opts.dump().c_str(),
        sim_trace.empty() ? nullptr : sim_trace.c_str(),
        sim_svg.empty() ? nullptr : sim_svg.c_str(), invocation.c_str(), &outcome, &steps,
        &path_length);
    if (status != SGNAV_OK) std::exit(fail(status));
    std::cout << "outcome: " << sgnav_outcome_name(outcome) << " after " << steps
              << " steps (path " << path_length << " m)\n";
    if (!sim_trace.empty()) std::cout << "wrote " << sim_trace << '\n';
    if (!sim_svg.empty()) std::cout << "wrote " << sim_svg << '\n';
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
