#include "sgnav/predictors.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sgnav/adam.hpp"
#include "sgnav/autodiff.hpp"
#include "sgnav/errors.hpp"
#include "sgnav/pooling.hpp"
#include "sgnav/rng.hpp"

namespace sgnav {

namespace {

struct Rollout {
  // Per entity, per predicted step: the output distribution and the graph ref
  // of its absolute mean position (previous position + mean displacement,
  // chained so gradients reach every earlier step).
  std::vector<std::array<GaussianRefs, kPredictedSteps>> gauss;
  std::vector<std::array<Tape::Ref, kPredictedSteps>> abs_mu;
};

Tensor vec_tensor(Vec2 v) { return Tensor::vector({v.x, v.y}); }

// Builds the full multi-entity graph for one window batch. Hidden states
// start at zero and live for the whole window. Binning positions are plain
// values (the cell indicator has no useful gradient); the pooled hidden
// states are graph refs, so training signals flow between entities.
Rollout roll_forward(Tape& tape, const ParamRefs& p, const ModelConfig& cfg,
                     const WindowBatch& batch) {
  const int n = static_cast<int>(batch.windows.size());
  const NeighborhoodGrid grid{cfg.grid_extent, cfg.grid_cells};

  Rollout out;
  out.gauss.resize(n);
  out.abs_mu.resize(n);

  const Tape::Ref zero_state = tape.leaf(Tensor(cfg.hidden_dim, 1));
  std::vector<Tape::Ref> h(n, zero_state), c(n, zero_state);
  std::vector<Vec2> pos(n);           // entity positions at the current step
  std::vector<Tape::Ref> mu_disp(n);  // last predicted mean displacement

  for (int s = 0; s < kWindowSteps - 1; ++s) {
    for (int i = 0; i < n; ++i) {
      pos[i] = s < kObservedSteps ? batch.windows[i].observed[s]
                                  : Vec2{tape.value(out.abs_mu[i][s - kObservedSteps]).v[0],
                                         tape.value(out.abs_mu[i][s - kObservedSteps]).v[1]};
    }

    std::vector<Tape::Ref> next_h(n), next_c(n);
    for (int i = 0; i < n; ++i) {
      Tape::Ref disp;
      if (s == 0) {
        disp = tape.leaf(Tensor(2, 1));
      } else if (s < kObservedSteps) {
        disp = tape.leaf(
            vec_tensor(batch.windows[i].observed[s] - batch.windows[i].observed[s - 1]));
      } else {
        disp = mu_disp[i];
      }

      Tape::Ref input = embed(tape, p, "embed_coord", disp);
      if (cfg.pools_hidden()) {
        std::vector<PooledNeighborRef> neighbors;
        neighbors.reserve(n - 1);
        for (int j = 0; j < n; ++j)
          if (j != i)
            neighbors.push_back({batch.windows[j].entity_id, pos[j], h[j]});
        const Tape::Ref pooled = social_pool_node(tape, batch.windows[i].entity_id, pos[i],
                                                  neighbors, grid, cfg.hidden_dim);
        input = tape.concat(input, embed(tape, p, "embed_pool", pooled));
      } else if (cfg.uses_pooling()) {
        std::vector<std::pair<PedestrianId, Vec2>> neighbors;
        neighbors.reserve(n - 1);
        for (int j = 0; j < n; ++j)
          if (j != i) neighbors.emplace_back(batch.windows[j].entity_id, pos[j]);
        const Tape::Ref occ = tape.leaf(
            occupancy_map(batch.windows[i].entity_id, pos[i], neighbors, grid));
        input = tape.concat(input, embed(tape, p, "embed_occ", occ));
      }

      const LstmStateRefs next =
          lstm_step(tape, p, input, LstmStateRefs{h[i], c[i]}, cfg.hidden_dim);
      next_h[i] = next.h;
      next_c[i] = next.c;

      if (s >= kObservedSteps - 1) {
        const int k = s - (kObservedSteps - 1);
        const GaussianRefs g = gaussian_head(tape, p, next.h);
        out.gauss[i][k] = g;
        const Tape::Ref prev_pos =
            k == 0 ? tape.leaf(vec_tensor(batch.windows[i].observed[kObservedSteps - 1]))
                   : out.abs_mu[i][k - 1];
        out.abs_mu[i][k] = tape.add(prev_pos, g.mu);
        mu_disp[i] = g.mu;
      }
    }
    h = std::move(next_h);
    c = std::move(next_c);
  }
  return out;
}

// Mean per-entity NLL of the batch truths under the rollout, as a graph node.
Tape::Ref batch_loss(Tape& tape, const Rollout& roll, const WindowBatch& batch) {
  Tape::Ref total = -1;
  for (std::size_t i = 0; i < batch.windows.size(); ++i) {
    for (int k = 0; k < kPredictedSteps; ++k) {
      const Tape::Ref term =
          tape.gaussian_nll(roll.abs_mu[i][k], roll.gauss[i][k].sigma,
                            roll.gauss[i][k].rho, batch.truth[i].points[k]);
      total = total < 0 ? term : tape.add(total, term);
    }
  }
  return tape.scale(total, 1.0 / static_cast<double>(batch.windows.size()));
}

GradientMap collect_gradients(const Tape& tape, const ParamRefs& refs) {
  GradientMap grads;
  for (const auto& [name, ref] : refs.refs) grads[name] = tape.grad(ref);
  return grads;
}

void accumulate(GradientMap& into, const GradientMap& share, double weight) {
  for (const auto& [name, g] : share) {
    auto it = into.find(name);
    if (it == into.end()) {
      it = into.emplace(name, Tensor(g.rows, g.cols)).first;
    }
    for (int i = 0; i < g.size(); ++i) it->second.v[i] += weight * g.v[i];
  }
}

}  // namespace

PredictionHorizon predict_linear(const EntityWindow& window) {
  // Least squares of position against step index: slope over t = 0..4 with
  // mean 2 and spread sum (t-2)^2 = 10.
  Vec2 mean{};
  for (const Vec2& p : window.observed) mean += p;
  mean = mean / kObservedSteps;
  Vec2 slope{};
  for (int t = 0; t < kObservedSteps; ++t)
    slope += (window.observed[t] - mean) * (t - 2.0);
  slope = slope / 10.0;

  PredictionHorizon out;
  for (int k = 0; k < kPredictedSteps; ++k) {
    const double t = kObservedSteps + k;
    out.points[k] = mean + slope * (t - 2.0);
  }
  return out;
}

std::vector<PredictionHorizon> predict_batch(const ModelConfig& cfg,
                                             const ParameterSet& params,
                                             const WindowBatch& batch) {
  cfg.validate();
  if (cfg.kind == PredictorKind::kLinear) {
    std::vector<PredictionHorizon> out;
    out.reserve(batch.windows.size());
    for (const EntityWindow& w : batch.windows) out.push_back(predict_linear(w));
    return out;
  }

  Tape tape;
  const ParamRefs refs = stage_parameters(tape, params, /*requires_grad=*/false);
  const Rollout roll = roll_forward(tape, refs, cfg, batch);

  std::vector<PredictionHorizon> out(batch.windows.size());
  for (std::size_t i = 0; i < batch.windows.size(); ++i) {
    std::array<Gaussian2D, kPredictedSteps> gs{};
    for (int k = 0; k < kPredictedSteps; ++k) {
      Gaussian2D g = read_gaussian(tape, roll.gauss[i][k]);
      g.mu = {tape.value(roll.abs_mu[i][k]).v[0], tape.value(roll.abs_mu[i][k]).v[1]};
      gs[k] = g;
      out[i].points[k] = g.mu;
    }
    out[i].gaussians = gs;
  }
  return out;
}

TrainResult train(const ModelConfig& cfg, const std::vector<WindowBatch>& data,
                  const TrainConfig& tc) {
  cfg.validate();
  if (cfg.kind == PredictorKind::kLinear)
    throw std::invalid_argument("the linear baseline is not trained");
  if (tc.epochs < 1 || tc.batch_size < 1)
    throw std::invalid_argument("epochs and batch_size must be positive");

  std::size_t total_entities = 0;
  for (const WindowBatch& b : data) total_entities += b.windows.size();
  if (total_entities == 0) throw NoWindowsError("training dataset has no complete windows");

  TrainResult result;
  result.params = init_parameters(cfg, tc.seed);
  AdamOptimizer opt(AdamConfig{.lr = tc.lr});
  Rng shuffle_rng(tc.seed ^ 0x9e3779b97f4a7c15ull);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_nll = 0.0;
    std::size_t epoch_entities = 0;

    for (std::size_t begin = 0; begin < order.size(); begin += tc.batch_size) {
      const std::size_t end = std::min(order.size(), begin + tc.batch_size);
      const int batch_id = static_cast<int>(begin / tc.batch_size);

      GradientMap grads;
      double step_entities = 0;
      double step_nll_sum = 0.0;  // entity-weighted
      for (std::size_t bi = begin; bi < end; ++bi) {
        const WindowBatch& wb = data[order[bi]];
        if (wb.windows.empty()) continue;
        Tape tape;
        const ParamRefs refs = stage_parameters(tape, result.params, /*requires_grad=*/true);
        const Rollout roll = roll_forward(tape, refs, cfg, wb);
        const Tape::Ref loss = batch_loss(tape, roll, wb);
        const double loss_value = tape.value(loss).v[0];
        if (!std::isfinite(loss_value)) throw TrainDivergedError(epoch + 1, batch_id);
        tape.backward(loss);
        accumulate(grads, collect_gradients(tape, refs),
                   static_cast<double>(wb.windows.size()));
        step_nll_sum += loss_value * static_cast<double>(wb.windows.size());
        step_entities += static_cast<double>(wb.windows.size());
      }
      if (step_entities == 0) continue;

      // Every window batch contributed gradients of its mean entity loss,
      // weighted by entity count; normalize to the mean over the mini-batch.
      for (auto& [name, g] : grads)
        for (double& v : g.v) v /= step_entities;
      clip_global_norm(grads, tc.clip_norm);
      if (!opt.step(result.params, grads)) ++result.rejected_steps;

      epoch_nll += step_nll_sum;
      epoch_entities += static_cast<std::size_t>(step_entities);
    }

    result.epoch_mean_nll.push_back(epoch_nll / static_cast<double>(epoch_entities));
  }
  return result;
}

double mean_nll(const ModelConfig& cfg, const ParameterSet& params,
                const std::vector<WindowBatch>& data) {
  double total = 0.0;
  std::size_t entities = 0;
  for (const WindowBatch& wb : data) {
    if (wb.windows.empty()) continue;
    Tape tape;
    const ParamRefs refs = stage_parameters(tape, params, /*requires_grad=*/false);
    const Rollout roll = roll_forward(tape, refs, cfg, wb);
    const Tape::Ref loss = batch_loss(tape, roll, wb);
    total += tape.value(loss).v[0] * static_cast<double>(wb.windows.size());
    entities += wb.windows.size();
  }
  if (entities == 0) throw NoWindowsError("no windows to evaluate");
  return total / static_cast<double>(entities);
}

double batch_nll_gradients(const ModelConfig& cfg, const ParameterSet& params,
                           const WindowBatch& batch, GradientMap& grads) {
  cfg.validate();
  if (batch.windows.empty()) throw NoWindowsError("no windows to evaluate");
  Tape tape;
  const ParamRefs refs = stage_parameters(tape, params, /*requires_grad=*/true);
  const Rollout roll = roll_forward(tape, refs, cfg, batch);
  const Tape::Ref loss = batch_loss(tape, roll, batch);
  tape.backward(loss);
  grads = collect_gradients(tape, refs);
  return tape.value(loss).v[0];
}

std::array<Vec2, kPredictedSteps> sample_trajectory(const PredictionHorizon& horizon,
                                                    std::uint64_t seed) {
  if (!horizon.gaussians)
    throw std::invalid_argument("sampling needs a distributional prediction");
  Rng rng(seed);
  std::array<Vec2, kPredictedSteps> out{};
  for (int k = 0; k < kPredictedSteps; ++k) {
    const Gaussian2D& g = (*horizon.gaussians)[k];
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    out[k].x = g.mu.x + g.sigma.x * z1;
    out[k].y = g.mu.y + g.sigma.y * (g.rho * z1 + std::sqrt(1.0 - g.rho * g.rho) * z2);
  }
  return out;
}

}  // namespace sgnav
