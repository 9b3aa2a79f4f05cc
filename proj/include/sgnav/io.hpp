#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sgnav/evaluation.hpp"
#include "sgnav/geometry.hpp"
#include "sgnav/navigation.hpp"
#include "sgnav/types.hpp"

namespace sgnav {

// Shortest round-trip decimal rendering, locale-independent. All numeric
// artifact output goes through this so artifacts are byte-stable.
std::string format_double(double v);

// ---------------------------------------------------------------- scenes ---

struct LoadReport {
  Scene scene;
  std::vector<std::string> warnings;  // e.g. re-sorted frames, skipped rows
};

// Whitespace-separated `frame ped_id x y`, positions in meters.
LoadReport load_ethucy(const std::filesystem::path& path);

// One `{"frame":..,"id":..,"x":..,"y":..}` object per line — the canonical
// interchange format. save_jsonl(load_jsonl(f)) reproduces f byte-for-byte
// for files save_jsonl wrote.
LoadReport load_jsonl(const std::filesystem::path& path);
void save_jsonl(const std::filesystem::path& path, const Scene& scene);

// CSV `frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z`. World (x, y)
// is used when present (> -1); otherwise the position is recovered from the
// bbox foot point through the camera and depth grid, which must then be
// provided. Rows whose depth sample is nonpositive are skipped with a
// warning.
LoadReport load_mot15(const std::filesystem::path& path,
                      const std::optional<CameraModel>& camera = std::nullopt,
                      const std::optional<DepthGrid>& depth = std::nullopt);

// Dispatch by format name: "ethucy", "mot15", or "jsonl".
LoadReport load_trajectories(const std::filesystem::path& path, const std::string& format,
                             const std::optional<CameraModel>& camera = std::nullopt,
                             const std::optional<DepthGrid>& depth = std::nullopt);

// ---------------------------------------------------- group annotations ---

struct GroupBox {
  GroupId group_id = 0;
  std::vector<PedestrianId> members;              // nonempty, sorted
  std::optional<std::array<double, 4>> bbox;      // left, top, width, height (px)
};

// Human or machine group labels, per frame. Members must be disjoint across
// the groups of a frame.
struct GroupAnnotation {
  std::map<FrameId, std::vector<GroupBox>> frames;

  void validate() const;
};

GroupAnnotation load_group_annotation(const std::filesystem::path& path);
void save_group_annotation(const std::filesystem::path& path, const GroupAnnotation& ann,
                           const std::string& invocation);

// Bridges to the grouping pipeline. Bboxes drop, and group ids are re-keyed
// to each group's smallest member id (the invariant Grouping enforces).
std::map<FrameId, Grouping> annotation_groupings(const GroupAnnotation& ann);
GroupAnnotation annotation_from_groupings(const std::map<FrameId, Grouping>& groupings);

// How often a detected partition agrees with a reference partition. A frame
// matches when both partitions are identical after restriction to the
// pedestrians they share. A single-frame `truth` is treated as
// time-invariant and compared against every frame of `actual`.
struct RecoveryReport {
  int frames_compared = 0;
  int frames_matched = 0;
  double rate = 0.0;  // matched / compared, 0 when nothing compared
};

RecoveryReport grouping_recovery(const std::map<FrameId, Grouping>& actual,
                                 const std::map<FrameId, Grouping>& truth);

void write_recovery_csv(const std::filesystem::path& path, const RecoveryReport& report,
                        const std::string& invocation);

// -------------------------------------------------------------- synthesis ---

struct SynthConfig {
  int pedestrians = 20;
  // Relative weights of group sizes 1, 2, 3, ... when carving the crowd.
  std::vector<double> group_size_weights = {0.5, 0.3, 0.2};
  double speed_min = 0.8;   // m/s
  double speed_max = 1.4;   // m/s
  double jitter_sigma = 0.05;  // per-member zero-mean position noise, meters
  enum class Path { kStraight, kArc } path = Path::kStraight;
  double arc_curvature = 0.05;  // 1/m, shared by every entity when path=kArc
  int duration_steps = 30;
  FrameId frame_stride = 12;    // frame ids advance by this per model step
  double area_half_width = 10.0;  // spawn square half-size, meters
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthResult {
  Scene scene;
  Grouping grouping;  // ground-truth partition (spawn-time groups)
};

// Groups share one base path (rigid formation, optional shared-curvature
// arc); members add independent jitter. Deterministic per seed.
SynthResult synthesize(const SynthConfig& cfg);

// --------------------------------------------------------- camera, depth ---

// JSON {"fov": radians, "image_width": px, "image_height": px}.
CameraModel load_camera(const std::filesystem::path& path);

// Rectangular float grid, one CSV row per pixel row, values in meters.
DepthGrid load_depth_csv(const std::filesystem::path& path);
// 16-bit grayscale PGM (P2 or P5); raw values scale to meters.
DepthGrid load_depth_pgm(const std::filesystem::path& path, double meters_per_unit = 0.001);
// Dispatch by extension: .pgm or anything else as CSV.
DepthGrid load_depth(const std::filesystem::path& path, double meters_per_unit = 0.001);

// -------------------------------------------------------------- artifacts ---

// First line of every CSV/SVG artifact: tool version + exact invocation.
// Deliberately timestamp-free so artifacts are reproducible.
void write_artifact_header(std::ostream& out, const std::string& invocation);

void write_loss_csv(const std::filesystem::path& path,
                    const std::vector<double>& epoch_mean_nll, const std::string& invocation);

// One row per (window, entity, member, predicted step).
struct PredictionRow {
  int start_step = 0;
  FrameId start_frame = 0;
  GroupId entity_id = 0;
  PedestrianId ped_id = 0;
  int step = 0;  // 1..5 within the horizon
  Vec2 pred;     // member position (entity mean + frozen offset)
  Gaussian2D entity;  // entity-level distribution; sigma = 0 marks point predictions
};

std::vector<PredictionRow> prediction_rows(const Scene& scene, int stride,
                                           const WindowBatch& batch,
                                           const std::vector<PredictionHorizon>& horizons);

void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<PredictionRow>& rows,
                           const std::string& invocation);
std::vector<PredictionRow> read_predictions_csv(const std::filesystem::path& path);

// Collapses rows back to per-person windows for the metrics (expects all 5
// steps of each person-window).
std::vector<PersonWindowPrediction> to_person_windows(const std::vector<PredictionRow>& rows);

void write_metrics_csv(const std::filesystem::path& path, const MetricReport& report,
                       const std::string& invocation);
void write_bench_csv(const std::filesystem::path& path, const BenchReport& report,
                     const std::string& invocation);
void write_trace_csv(const std::filesystem::path& path, const SimResult& result,
                     const std::string& invocation);
void write_trace_svg(const std::filesystem::path& path, const SimResult& result,
                     const Scene& scene, const std::string& invocation);

// -------------------------------------------------------------- scenario ---

// JSON scenario: robot config + goal + scripted tracks; `model` paths resolve
// relative to the scenario file.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace sgnav
