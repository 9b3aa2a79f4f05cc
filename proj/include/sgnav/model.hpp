#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "sgnav/autodiff.hpp"
#include "sgnav/tensor.hpp"
#include "sgnav/types.hpp"

namespace sgnav {

enum class PredictorKind {
  kLinear,
  kVanillaLstm,
  kOccupancyLstm,
  kSocialLstm,
  kSocialGroupLstm,
};

// CLI / file spellings: linear, vanilla_lstm, o_lstm, s_lstm, sg_lstm.
std::string to_string(PredictorKind kind);
PredictorKind predictor_kind_from_string(const std::string& name);

struct ModelConfig {
  PredictorKind kind = PredictorKind::kSocialGroupLstm;
  int embedding_dim = 32;
  int hidden_dim = 64;
  int grid_cells = 4;        // G: cells per side of the square neighborhood
  double grid_extent = 4.0;  // metres from the entity to the grid edge

  void validate() const;

  // Whether the recurrent input carries a pooled-neighborhood embedding.
  bool uses_pooling() const {
    return kind == PredictorKind::kOccupancyLstm || kind == PredictorKind::kSocialLstm ||
           kind == PredictorKind::kSocialGroupLstm;
  }
  // Social variants pool neighbor hidden states; the occupancy baseline only
  // pools presence counts.
  bool pools_hidden() const {
    return kind == PredictorKind::kSocialLstm || kind == PredictorKind::kSocialGroupLstm;
  }
  // Length of the flattened pooled vector fed to its embedding layer.
  int pooling_input_dim() const {
    const int cells = grid_cells * grid_cells;
    return pools_hidden() ? cells * hidden_dim : cells;
  }
  // Width of the LSTM input: coordinate embedding, plus the pooled embedding
  // for the pooling variants.
  int lstm_input_dim() const { return uses_pooling() ? 2 * embedding_dim : embedding_dim; }
};

// Named tensors, keyed by stable names (embed_coord.W, lstm.W_x, head.b, ...).
// std::map keeps iteration deterministic for persistence and optimizer state.
struct ParameterSet {
  std::map<std::string, Tensor> tensors;
  std::uint64_t rng_seed = 0;

  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  bool all_finite() const;
};

// Fresh parameters for the architecture `cfg` describes: weights drawn
// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero except the forget
// gate block, which starts at +1 so early training does not forget.
ParameterSet init_parameters(const ModelConfig& cfg, std::uint64_t seed);

// Model file round-trip: versioned JSON with config, seed, and each tensor as
// a shape plus base64 little-endian float32 payload. `invocation` records how
// the file was produced (no timestamps, so repeated runs stay byte-identical).
void save_model(const std::filesystem::path& path, const ModelConfig& cfg,
                const ParameterSet& params, const std::string& invocation = "");
struct LoadedModel {
  ModelConfig config;
  ParameterSet params;
};
LoadedModel load_model(const std::filesystem::path& path);

// --- graph construction -----------------------------------------------------
// The pieces below append to a Tape. Parameters are staged once per pass and
// addressed by name so the same blocks serve every LSTM variant.

struct ParamRefs {
  std::map<std::string, Tape::Ref> refs;
  Tape::Ref at(const std::string& name) const;
};

ParamRefs stage_parameters(Tape& tape, const ParameterSet& params, bool requires_grad);

// relu(W x + b) with weights `<prefix>.W` / `<prefix>.b`.
Tape::Ref embed(Tape& tape, const ParamRefs& p, const std::string& prefix, Tape::Ref input);

struct LstmStateRefs {
  Tape::Ref h = -1;
  Tape::Ref c = -1;
};

// One cell update. Gate rows of lstm.W_x / lstm.W_h / lstm.b are stacked
// [input, forget, candidate, output], each hidden_dim wide:
//   c' = sigmoid(f) * c + sigmoid(i) * tanh(g),  h' = sigmoid(o) * tanh(c').
LstmStateRefs lstm_step(Tape& tape, const ParamRefs& p, Tape::Ref input,
                        const LstmStateRefs& prev, int hidden_dim);

struct GaussianRefs {
  Tape::Ref mu = -1;     // 2-vector, displacement from the previous position
  Tape::Ref sigma = -1;  // 2-vector, strictly positive
  Tape::Ref rho = -1;    // 1-vector in (-1, 1)
};

// head.W (5 x hidden) + head.b over h, then mu = raw[0:2],
// sigma = exp(raw[2:4]), rho = tanh(raw[4]).
GaussianRefs gaussian_head(Tape& tape, const ParamRefs& p, Tape::Ref h);

Gaussian2D read_gaussian(const Tape& tape, const GaussianRefs& g);

// --- plain-value twins used by tests and the linear baseline ----------------
Tensor embed_value(const Tensor& w, const Tensor& b, const Tensor& input);
struct LstmState {
  Tensor h, c;
};
LstmState lstm_step_value(const Tensor& w_x, const Tensor& w_h, const Tensor& b,
                          const Tensor& input, const LstmState& prev);
Gaussian2D gaussian_head_value(const Tensor& w, const Tensor& b, const Tensor& h);
double nll_value(Vec2 target, const Gaussian2D& g);

}  // namespace sgnav
