#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sgnav/adam.hpp"
#include "sgnav/model.hpp"
#include "sgnav/windows.hpp"

namespace sgnav {

// Constant-velocity least-squares fit over the observed steps, extrapolated
// over the prediction horizon. Emits points only (no distribution).
PredictionHorizon predict_linear(const EntityWindow& window);

// One shared recurrent rollout serves every learned variant: the observed
// steps consume ground-truth displacements, the predicted steps consume the
// model's own mean displacement (closed loop). Social pooling couples the
// entities of the batch, so a batch is predicted as a whole. Deterministic
// given parameters; entity order follows batch.windows.
std::vector<PredictionHorizon> predict_batch(const ModelConfig& cfg,
                                             const ParameterSet& params,
                                             const WindowBatch& batch);

struct TrainConfig {
  int epochs = 200;
  int batch_size = 16;  // window batches per gradient step
  double lr = 1e-3;
  double clip_norm = 10.0;
  std::uint64_t seed = 0;
};

struct TrainResult {
  ParameterSet params;
  std::vector<double> epoch_mean_nll;  // one entry per epoch
  int rejected_steps = 0;              // optimizer steps skipped on non-finite gradients
};

// Mini-batch training on the mean per-entity prediction-horizon NLL.
// Throws TrainDivergedError when a batch loss goes non-finite and
// NoWindowsError when the dataset contains no entities.
TrainResult train(const ModelConfig& cfg, const std::vector<WindowBatch>& data,
                  const TrainConfig& tc);

// Mean NLL of `data` under the model, without touching parameters.
double mean_nll(const ModelConfig& cfg, const ParameterSet& params,
                const std::vector<WindowBatch>& data);

// One batch's mean per-entity NLL together with its exact parameter
// gradients, bypassing the optimizer — the hook gradient checkers use.
double batch_nll_gradients(const ModelConfig& cfg, const ParameterSet& params,
                           const WindowBatch& batch, GradientMap& grads);

// Draws one trajectory from a predicted horizon (bivariate normals via the
// Cholesky construction). Requires horizon.gaussians.
std::array<Vec2, kPredictedSteps> sample_trajectory(const PredictionHorizon& horizon,
                                                    std::uint64_t seed);

}  // namespace sgnav
