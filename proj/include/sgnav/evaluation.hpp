#pragma once

#include <array>
#include <vector>

#include "sgnav/model.hpp"
#include "sgnav/types.hpp"
#include "sgnav/windows.hpp"

namespace sgnav {

// Mean distance between aligned predicted and true positions, over all
// persons and all predicted steps. `squared` reports mean squared distance
// instead of mean Euclidean distance.
double ade(const std::vector<std::array<Vec2, kPredictedSteps>>& predicted,
           const std::vector<std::array<Vec2, kPredictedSteps>>& truth,
           bool squared = false);

// Mean distance at the final predicted step only.
double fde(const std::vector<std::array<Vec2, kPredictedSteps>>& predicted,
           const std::vector<std::array<Vec2, kPredictedSteps>>& truth,
           bool squared = false);

// One person's predicted path over one window, tagged with where it came
// from. This is the unit the metrics consume and the predictions CSV stores.
struct PersonWindowPrediction {
  int start_step = 0;
  GroupId entity_id = 0;
  PedestrianId ped_id = 0;
  std::array<Vec2, kPredictedSteps> points{};
};

struct PersonErrors {
  PedestrianId ped_id = 0;
  double ade = 0.0;
  double fde = 0.0;
  int windows = 0;
};

struct MetricReport {
  double ade = 0.0;
  double fde = 0.0;
  bool squared = false;
  int evaluated = 0;  // person-windows that had full ground truth
  int excluded = 0;   // person-windows skipped for missing ground truth
  std::vector<PersonErrors> per_person;  // ascending ped id
};

// Scores person-level predictions against the scene's tracks at the predicted
// steps. Person-windows with any missing ground-truth step are excluded and
// counted.
MetricReport evaluate(const Scene& scene, int stride,
                      const std::vector<PersonWindowPrediction>& predictions,
                      bool squared = false);

// --- runtime benchmark -------------------------------------------------------

struct BenchConfig {
  int warmup = 3;
  int repetitions = 11;
};

struct BenchMethod {
  ModelConfig config;   // kind determines the predictor
  ParameterSet params;  // ignored for the linear baseline
};

struct MethodTiming {
  PredictorKind kind{};
  double median_ms = 0.0;
  std::vector<double> samples_ms;  // post-warmup repetitions, in run order
};

struct BenchReport {
  std::vector<MethodTiming> methods;  // order follows the bench call
  int warmup = 0;
  int repetitions = 0;
  int pedestrians = 0;
  int grouped_entities = 0;    // entities when the grouping is applied
  int singleton_entities = 0;  // entities when every pedestrian stands alone
  double group_fraction = 0.0; // share of pedestrians in non-singleton groups
};

// Times full scene predictions per method over identical prebuilt windows:
// grouped windows for the group-entity predictor, singleton windows for the
// rest. Window building and grouping are excluded from the timed region.
// Requires a sub-microsecond steady clock; throws std::runtime_error
// otherwise. A scene with no complete windows yields a report with no
// timings.
BenchReport bench(const std::vector<BenchMethod>& methods, const Scene& scene,
                  const Grouping& grouping, int stride, const BenchConfig& bc);

}  // namespace sgnav
