#ifndef SGNAV_H
#define SGNAV_H

/*
 * C interface to libsgnav: pedestrian trajectory prediction with social
 * pooling over walking groups, and the navigation simulator built on it.
 *
 * Conventions
 *   - Every fallible call returns sgnav_status; SGNAV_OK is 0. On failure the
 *     calling thread's sgnav_last_error() carries the message until its next
 *     failing call. Out-parameters are written only on SGNAV_OK.
 *   - Handles come from the constructors below and are released with the
 *     matching _free, which tolerates NULL.
 *   - Rich settings travel as a flat JSON object string; NULL or "" means
 *     all defaults. Unknown keys are rejected so typos fail loudly. The keys
 *     each call accepts are listed at its declaration.
 *   - `invocation` is embedded verbatim in the header of every artifact the
 *     call writes (provenance, no timestamps). Pass the command line, or ""
 *     when embedding the library.
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgnav_status {
  SGNAV_OK = 0,
  SGNAV_ERR_INVALID_ARGUMENT = 1, /* bad option value, null handle, bad config */
  SGNAV_ERR_PARSE = 2,            /* malformed input file */
  SGNAV_ERR_IO = 3,               /* missing or unwritable file */
  SGNAV_ERR_NO_WINDOWS = 4,       /* scene too short to form any window */
  SGNAV_ERR_TRAIN_DIVERGED = 5,   /* training loss went non-finite */
  SGNAV_ERR_INTERNAL = 6          /* unexpected failure */
} sgnav_status;

/* Library version, e.g. "0.1.0". Static storage. */
const char* sgnav_version(void);

/* Message of the calling thread's most recent failure ("" when none). The
 * pointer stays valid until this thread's next failing sgnav call. */
const char* sgnav_last_error(void);

/* Stable lowercase token for a status ("ok", "parse", ...). Static storage. */
const char* sgnav_status_name(sgnav_status status);

/* A loaded or synthesized set of pedestrian tracks. */
typedef struct sgnav_scene sgnav_scene;
/* A predictor: architecture plus trained (or freshly initialized) weights. */
typedef struct sgnav_model sgnav_model;

void sgnav_scene_free(sgnav_scene* scene);
void sgnav_model_free(sgnav_model* model);

/* ------------------------------------------------------------- scenes --- */

/* Load tracks from `path`. `format` is "ethucy", "mot15", or "jsonl".
 * `camera_path` (JSON intrinsics) and `depth_path` (.pgm or CSV grid) are
 * only consulted by the mot15 loader, for rows without world coordinates;
 * pass NULL when unused. */
sgnav_status sgnav_scene_load(const char* path, const char* format,
                              const char* camera_path, const char* depth_path,
                              sgnav_scene** out_scene);

/* Write the scene in the canonical JSON-Lines interchange format. */
sgnav_status sgnav_scene_save_jsonl(const sgnav_scene* scene, const char* path);

/* Counts for summaries. Return 0 on a NULL handle. */
int sgnav_scene_pedestrian_count(const sgnav_scene* scene);
long long sgnav_scene_frame_count(const sgnav_scene* scene);

/* Loader warnings (re-sorted input, skipped rows, ...). `sgnav_scene_warning`
 * returns NULL when `index` is out of range; the pointer lives as long as the
 * scene. */
int sgnav_scene_warning_count(const sgnav_scene* scene);
const char* sgnav_scene_warning(const sgnav_scene* scene, int index);

/* Generate a synthetic scene of jittered group formations.
 * Options: pedestrians (int), group_size_weights (array of numbers),
 * speed_min, speed_max, jitter_sigma, path ("straight" | "arc"),
 * arc_curvature, duration_steps (int), frame_stride (int), area_half_width,
 * seed (uint64). The spawn-time partition is retained on the handle as the
 * ground-truth grouping. */
sgnav_status sgnav_synthesize(const char* options_json, sgnav_scene** out_scene);

/* 1 when the scene carries a ground-truth grouping (synthesized scenes do). */
int sgnav_scene_has_truth_grouping(const sgnav_scene* scene);

/* Write the ground-truth grouping as a group-annotation JSON file. */
sgnav_status sgnav_scene_save_truth_groups(const sgnav_scene* scene, const char* path,
                                           const char* invocation);

/* ----------------------------------------------------------- grouping --- */

/* Run the rule-based group detector at every model step and write the
 * per-frame partitions as a group-annotation JSON file.
 * Options: stride (int), max_pair_distance, max_speed_diff, max_heading_diff,
 * min_persist_steps (int). */
sgnav_status sgnav_detect_groups(const sgnav_scene* scene, const char* options_json,
                                 const char* out_path, const char* invocation);

/* Compare two group-annotation files frame by frame: a frame matches when
 * both partitions agree on the pedestrians they share. A single-frame truth
 * file counts as time-invariant. `csv_path` (optional, NULL to skip) receives
 * a one-row summary. Each out-pointer may be NULL. */
sgnav_status sgnav_grouping_recovery(const char* detected_path, const char* truth_path,
                                     const char* csv_path, const char* invocation,
                                     int* out_compared, int* out_matched, double* out_rate);

/* ------------------------------------------------------------- models --- */

sgnav_status sgnav_model_load(const char* path, sgnav_model** out_model);
sgnav_status sgnav_model_save(const sgnav_model* model, const char* path,
                              const char* invocation);

/* Predictor kind token: "linear", "vanilla_lstm", "o_lstm", "s_lstm", or
 * "sg_lstm". Static storage; NULL on a NULL handle. */
const char* sgnav_model_kind(const sgnav_model* model);

/* Train a predictor on the scene's windows.
 * Options: kind (token as above; default "sg_lstm"), stride (int),
 * embedding_dim, hidden_dim, grid_cells (ints), grid_extent,
 * epochs, batch_size (ints), lr, clip_norm, seed (uint64),
 * grouping ("auto" | "truth" | "annotation" | "singleton"),
 * groups_path (annotation JSON, required for grouping="annotation"),
 * max_pair_distance, max_speed_diff, max_heading_diff, min_persist_steps.
 * The grouping options shape the training windows of the group-entity kind
 * only; the per-pedestrian kinds always train on singleton windows.
 * `model_path` and `loss_csv_path` are optional outputs (NULL to skip);
 * `out_model` (optional) receives the trained model. */
sgnav_status sgnav_train(const sgnav_scene* scene, const char* options_json,
                         const char* model_path, const char* loss_csv_path,
                         const char* invocation, sgnav_model** out_model);

/* ---------------------------------------------------------- prediction --- */

/* Predict every window of the scene and write the predictions CSV.
 * `model` may be NULL for the constant-velocity baseline, selected with
 * kind="linear"; a non-NULL model fixes the kind.
 * Options: kind, stride (int), grouping / groups_path and the four detector
 * thresholds as in sgnav_train. Default grouping for the group-entity kind:
 * "truth" when the scene carries one, else "auto". */
sgnav_status sgnav_predict(const sgnav_scene* scene, const sgnav_model* model,
                           const char* options_json, const char* csv_path,
                           const char* invocation);

/* Score a predictions CSV against the scene's tracks.
 * Options: stride (int), squared (bool, default false = Euclidean).
 * `csv_path` (optional) receives the metric report; `out_ade` / `out_fde`
 * (each optional) receive the headline numbers. */
sgnav_status sgnav_evaluate(const sgnav_scene* scene, const char* predictions_path,
                            const char* options_json, const char* csv_path,
                            const char* invocation, double* out_ade, double* out_fde);

/* Time all five predictors on the scene with freshly initialized weights and
 * write the runtime table CSV (rows: linear, s_lstm, o_lstm, vanilla_lstm,
 * sg_lstm).
 * Options: stride (int), warmup, repetitions (ints), seed (uint64),
 * embedding_dim, hidden_dim, grid_cells (ints), grid_extent,
 * grouping ("truth" | "auto" | "annotation"), groups_path, and the four
 * detector thresholds. Default grouping: "truth" when present, else "auto". */
sgnav_status sgnav_bench(const sgnav_scene* scene, const char* options_json,
                         const char* csv_path, const char* invocation);

/* ----------------------------------------------------------- simulator --- */

/* Run the navigation scenario at `scenario_path` to completion.
 * Options: max_steps (int) overrides the scenario's cap.
 * `trace_csv_path` and `svg_path` are optional outputs. `out_outcome`
 * (optional) receives 0 = goal reached, 1 = collision, 2 = step cap;
 * `out_steps` and `out_path_length` (each optional) the trace length and the
 * driven distance in meters. */
sgnav_status sgnav_simulate(const char* scenario_path, const char* options_json,
                            const char* trace_csv_path, const char* svg_path,
                            const char* invocation, int* out_outcome, int* out_steps,
                            double* out_path_length);

/* Token for an outcome code ("goal_reached", "collision", "step_cap");
 * "unknown" for anything else. Static storage. */
const char* sgnav_outcome_name(int outcome);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SGNAV_H */
