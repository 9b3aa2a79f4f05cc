#include "sgnav/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <stdexcept>

#include "sgnav/predictors.hpp"

namespace sgnav {

namespace {

double step_distance(Vec2 a, Vec2 b, bool squared) {
  const double d = distance(a, b);
  return squared ? d * d : d;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

double ade(const std::vector<std::array<Vec2, kPredictedSteps>>& predicted,
           const std::vector<std::array<Vec2, kPredictedSteps>>& truth, bool squared) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("prediction/truth person counts differ");
  if (predicted.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    for (int k = 0; k < kPredictedSteps; ++k)
      sum += step_distance(predicted[i][k], truth[i][k], squared);
  return sum / static_cast<double>(predicted.size() * kPredictedSteps);
}

double fde(const std::vector<std::array<Vec2, kPredictedSteps>>& predicted,
           const std::vector<std::array<Vec2, kPredictedSteps>>& truth, bool squared) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("prediction/truth person counts differ");
  if (predicted.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    sum += step_distance(predicted[i][kPredictedSteps - 1], truth[i][kPredictedSteps - 1],
                         squared);
  return sum / static_cast<double>(predicted.size());
}

MetricReport evaluate(const Scene& scene, int stride,
                      const std::vector<PersonWindowPrediction>& predictions, bool squared) {
  MetricReport report;
  report.squared = squared;

  struct Accum {
    double ade_sum = 0.0;
    double fde_sum = 0.0;
    int windows = 0;
  };
  std::map<PedestrianId, Accum> per_person;

  double ade_sum = 0.0, fde_sum = 0.0;
  for (const PersonWindowPrediction& p : predictions) {
    auto track_it = scene.tracks.find(p.ped_id);
    std::array<Vec2, kPredictedSteps> truth{};
    bool complete = track_it != scene.tracks.end();
    for (int k = 0; complete && k < kPredictedSteps; ++k) {
      auto pos = position_at_step(scene, track_it->second, stride,
                                  p.start_step + kObservedSteps + k);
      if (!pos)
        complete = false;
      else
        truth[k] = *pos;
    }
    if (!complete) {
      ++report.excluded;
      continue;
    }

    double window_ade = 0.0;
    for (int k = 0; k < kPredictedSteps; ++k)
      window_ade += step_distance(p.points[k], truth[k], squared);
    window_ade /= kPredictedSteps;
    const double window_fde =
        step_distance(p.points[kPredictedSteps - 1], truth[kPredictedSteps - 1], squared);

    ade_sum += window_ade;
    fde_sum += window_fde;
    ++report.evaluated;
    Accum& acc = per_person[p.ped_id];
    acc.ade_sum += window_ade;
    acc.fde_sum += window_fde;
    ++acc.windows;
  }

  if (report.evaluated > 0) {
    report.ade = ade_sum / report.evaluated;
    report.fde = fde_sum / report.evaluated;
  }
  for (const auto& [ped, acc] : per_person)
    report.per_person.push_back(
        {ped, acc.ade_sum / acc.windows, acc.fde_sum / acc.windows, acc.windows});
  return report;
}

BenchReport bench(const std::vector<BenchMethod>& methods, const Scene& scene,
                  const Grouping& grouping, int stride, const BenchConfig& bc) {
  using clock = std::chrono::steady_clock;
  static_assert(clock::is_steady);
  constexpr double tick_ns =
      1e9 * static_cast<double>(clock::period::num) / clock::period::den;
  if (tick_ns > 1000.0)
    throw std::runtime_error("steady clock resolution is coarser than 1 microsecond");
  if (bc.repetitions < 5) throw std::invalid_argument("bench needs at least 5 repetitions");

  BenchReport report;
  report.warmup = bc.warmup;
  report.repetitions = bc.repetitions;
  report.pedestrians = static_cast<int>(scene.tracks.size());

  const std::vector<WindowBatch> grouped =
      fixed_grouping_window_batches(scene, grouping, stride);
  const std::vector<WindowBatch> singles = singleton_window_batches(scene, stride);

  int grouped_peds = 0;
  for (const auto& [gid, members] : grouping.assignments)
    if (members.size() > 1) grouped_peds += static_cast<int>(members.size());
  report.group_fraction =
      scene.tracks.empty()
          ? 0.0
          : static_cast<double>(grouped_peds) / static_cast<double>(scene.tracks.size());
  for (const WindowBatch& b : grouped) report.grouped_entities += static_cast<int>(b.windows.size());
  for (const WindowBatch& b : singles)
    report.singleton_entities += static_cast<int>(b.windows.size());

  if (grouped.empty() && singles.empty()) return report;  // nothing to time

  for (const BenchMethod& method : methods) {
    const bool group_entities = method.config.kind == PredictorKind::kSocialGroupLstm;
    const std::vector<WindowBatch>& batches = group_entities ? grouped : singles;

    auto run_once = [&] {
      for (const WindowBatch& b : batches) {
        volatile double sink = 0.0;  // keep the prediction from being optimized out
        const auto horizons = predict_batch(method.config, method.params, b);
        sink = horizons.back().points.back().x;
        (void)sink;
      }
    };

    MethodTiming timing;
    timing.kind = method.config.kind;
    for (int w = 0; w < bc.warmup; ++w) run_once();
    for (int rep = 0; rep < bc.repetitions; ++rep) {
      const auto t0 = clock::now();
      run_once();
      const auto t1 = clock::now();
      timing.samples_ms.push_back(
          std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    timing.median_ms = median(timing.samples_ms);
    report.methods.push_back(std::move(timing));
  }
  return report;
}

}  // namespace sgnav
