#include "sgnav/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "sgnav/errors.hpp"
#include "sgnav/rng.hpp"
#include "sgnav/version.hpp"

namespace sgnav {

namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;
constexpr char kBase64Chars[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kBase64Chars[(v >> 18) & 63];
    out += kBase64Chars[(v >> 12) & 63];
    out += kBase64Chars[(v >> 6) & 63];
    out += kBase64Chars[v & 63];
    i += 3;
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const unsigned v = bytes[i] << 16;
    out += kBase64Chars[(v >> 18) & 63];
    out += kBase64Chars[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kBase64Chars[(v >> 18) & 63];
    out += kBase64Chars[(v >> 12) & 63];
    out += kBase64Chars[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  int table[256];
  std::fill(std::begin(table), std::end(table), -1);
  for (int i = 0; i < 64; ++i) table[static_cast<unsigned char>(kBase64Chars[i])] = i;

  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  unsigned acc = 0;
  int bits = 0;
  for (const char ch : text) {
    if (ch == '=') break;
    const int code = table[static_cast<unsigned char>(ch)];
    if (code < 0) throw ParseError("invalid base64 character in tensor data");
    acc = (acc << 6) | static_cast<unsigned>(code);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((acc >> bits) & 0xff));
    }
  }
  return out;
}

std::string tensor_to_base64(const Tensor& t) {
  std::vector<unsigned char> bytes(static_cast<std::size_t>(t.size()) * 4);
  for (int i = 0; i < t.size(); ++i) {
    const float f = static_cast<float>(t.v[i]);
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    bytes[4 * i + 0] = static_cast<unsigned char>(u & 0xff);
    bytes[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
    bytes[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
    bytes[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
  }
  return base64_encode(bytes);
}

Tensor tensor_from_base64(const std::string& data, int rows, int cols,
                          const std::string& name) {
  const std::vector<unsigned char> bytes = base64_decode(data);
  Tensor t(rows, cols);
  if (bytes.size() != static_cast<std::size_t>(t.size()) * 4)
    throw ParseError("tensor '" + name + "' payload does not match its shape");
  for (int i = 0; i < t.size(); ++i) {
    std::uint32_t u = bytes[4 * i] | (bytes[4 * i + 1] << 8) | (bytes[4 * i + 2] << 16) |
                      (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
    float f;
    std::memcpy(&f, &u, 4);
    t.v[i] = static_cast<double>(f);
  }
  return t;
}

Tensor init_matrix(int rows, int cols, Rng& rng) {
  Tensor t(rows, cols);
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  for (double& v : t.v) v = rng.uniform(-bound, bound);
  return t;
}

// Biases share their layer's fan-in bound rather than starting at zero: a
// zero bias would pin the first embedding pre-activation (whose input is the
// zero initial displacement) exactly on the relu kink.
Tensor init_bias(int rows, int fan_in, Rng& rng) {
  Tensor t(rows, 1);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : t.v) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

std::string to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::kLinear: return "linear";
    case PredictorKind::kVanillaLstm: return "vanilla_lstm";
    case PredictorKind::kOccupancyLstm: return "o_lstm";
    case PredictorKind::kSocialLstm: return "s_lstm";
    case PredictorKind::kSocialGroupLstm: return "sg_lstm";
  }
  throw std::invalid_argument("unknown predictor kind");
}

PredictorKind predictor_kind_from_string(const std::string& name) {
  if (name == "linear") return PredictorKind::kLinear;
  if (name == "vanilla_lstm") return PredictorKind::kVanillaLstm;
  if (name == "o_lstm") return PredictorKind::kOccupancyLstm;
  if (name == "s_lstm") return PredictorKind::kSocialLstm;
  if (name == "sg_lstm") return PredictorKind::kSocialGroupLstm;
  throw std::invalid_argument(
      "unknown predictor '" + name +
      "' (expected linear, vanilla_lstm, o_lstm, s_lstm, or sg_lstm)");
}

void ModelConfig::validate() const {
  if (embedding_dim <= 0) throw std::invalid_argument("embedding_dim must be positive");
  if (hidden_dim <= 0) throw std::invalid_argument("hidden_dim must be positive");
  if (grid_cells < 1) throw std::invalid_argument("grid_cells must be >= 1");
  if (!(grid_extent > 0.0)) throw std::invalid_argument("grid_extent must be positive");
}

Tensor& ParameterSet::at(const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw std::invalid_argument("no parameter named '" + name + "'");
  return it->second;
}

const Tensor& ParameterSet::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw std::invalid_argument("no parameter named '" + name + "'");
  return it->second;
}

bool ParameterSet::all_finite() const {
  for (const auto& [name, t] : tensors)
    for (const double v : t.v)
      if (!std::isfinite(v)) return false;
  return true;
}

ParameterSet init_parameters(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (cfg.kind == PredictorKind::kLinear)
    throw std::invalid_argument("the linear baseline has no trainable parameters");

  Rng rng(seed);
  ParameterSet params;
  params.rng_seed = seed;

  const int e = cfg.embedding_dim;
  const int h = cfg.hidden_dim;

  params.tensors["embed_coord.W"] = init_matrix(e, 2, rng);
  params.tensors["embed_coord.b"] = init_bias(e, 2, rng);
  if (cfg.uses_pooling()) {
    const char* prefix = cfg.pools_hidden() ? "embed_pool" : "embed_occ";
    params.tensors[std::string(prefix) + ".W"] = init_matrix(e, cfg.pooling_input_dim(), rng);
    params.tensors[std::string(prefix) + ".b"] = init_bias(e, cfg.pooling_input_dim(), rng);
  }
  params.tensors["lstm.W_x"] = init_matrix(4 * h, cfg.lstm_input_dim(), rng);
  params.tensors["lstm.W_h"] = init_matrix(4 * h, h, rng);
  Tensor lstm_b = init_bias(4 * h, h, rng);
  for (int k = h; k < 2 * h; ++k) lstm_b.v[k] += 1.0;  // forget gate starts open
  params.tensors["lstm.b"] = std::move(lstm_b);
  params.tensors["head.W"] = init_matrix(5, h, rng);
  params.tensors["head.b"] = init_bias(5, h, rng);
  return params;
}

void save_model(const std::filesystem::path& path, const ModelConfig& cfg,
                const ParameterSet& params, const std::string& invocation) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["generator"] = {{"tool", "sgnav"}, {"version", kVersion}, {"invocation", invocation}};
  doc["kind"] = to_string(cfg.kind);
  doc["config"] = {{"embedding_dim", cfg.embedding_dim},
                   {"hidden_dim", cfg.hidden_dim},
                   {"grid_cells", cfg.grid_cells},
                   {"grid_extent", cfg.grid_extent}};
  doc["rng_seed"] = params.rng_seed;
  json tensors = json::object();
  for (const auto& [name, t] : params.tensors) {
    tensors[name] = {{"shape", {t.rows, t.cols}}, {"data", tensor_to_base64(t)}};
  }
  doc["tensors"] = std::move(tensors);

  std::ofstream out(path);
  if (!out) throw IoError("cannot open model file for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing model file: " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("model file is not valid JSON: " + std::string(e.what()));
  }

  try {
    if (doc.at("format_version").get<int>() != kModelFormatVersion)
      throw ParseError("unsupported model format version");
    LoadedModel loaded;
    loaded.config.kind = predictor_kind_from_string(doc.at("kind").get<std::string>());
    const json& cfg = doc.at("config");
    loaded.config.embedding_dim = cfg.at("embedding_dim").get<int>();
    loaded.config.hidden_dim = cfg.at("hidden_dim").get<int>();
    loaded.config.grid_cells = cfg.at("grid_cells").get<int>();
    loaded.config.grid_extent = cfg.at("grid_extent").get<double>();
    loaded.config.validate();
    loaded.params.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
    for (const auto& [name, entry] : doc.at("tensors").items()) {
      const auto shape = entry.at("shape").get<std::vector<int>>();
      if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0)
        throw ParseError("tensor '" + name + "' has a malformed shape");
      loaded.params.tensors[name] = tensor_from_base64(
          entry.at("data").get<std::string>(), shape[0], shape[1], name);
    }
    if (!loaded.params.all_finite())
      throw ParseError("model file contains non-finite parameter values");
    return loaded;
  } catch (const json::exception& e) {
    throw ParseError("model file is missing fields: " + std::string(e.what()));
  }
}

Tape::Ref ParamRefs::at(const std::string& name) const {
  auto it = refs.find(name);
  if (it == refs.end()) throw std::invalid_argument("no staged parameter '" + name + "'");
  return it->second;
}

ParamRefs stage_parameters(Tape& tape, const ParameterSet& params, bool requires_grad) {
  ParamRefs out;
  for (const auto& [name, t] : params.tensors) out.refs[name] = tape.leaf(t, requires_grad);
  return out;
}

Tape::Ref embed(Tape& tape, const ParamRefs& p, const std::string& prefix, Tape::Ref input) {
  return tape.relu(tape.add(tape.matvec(p.at(prefix + ".W"), input), p.at(prefix + ".b")));
}

LstmStateRefs lstm_step(Tape& tape, const ParamRefs& p, Tape::Ref input,
                        const LstmStateRefs& prev, int hidden_dim) {
  const Tape::Ref pre =
      tape.add(tape.add(tape.matvec(p.at("lstm.W_x"), input),
                        tape.matvec(p.at("lstm.W_h"), prev.h)),
               p.at("lstm.b"));
  const Tape::Ref i = tape.sigmoid(tape.slice(pre, 0, hidden_dim));
  const Tape::Ref f = tape.sigmoid(tape.slice(pre, hidden_dim, hidden_dim));
  const Tape::Ref g = tape.tanh_fn(tape.slice(pre, 2 * hidden_dim, hidden_dim));
  const Tape::Ref o = tape.sigmoid(tape.slice(pre, 3 * hidden_dim, hidden_dim));
  LstmStateRefs next;
  next.c = tape.add(tape.mul(f, prev.c), tape.mul(i, g));
  next.h = tape.mul(o, tape.tanh_fn(next.c));
  return next;
}

GaussianRefs gaussian_head(Tape& tape, const ParamRefs& p, Tape::Ref h) {
  const Tape::Ref raw = tape.add(tape.matvec(p.at("head.W"), h), p.at("head.b"));
  GaussianRefs g;
  g.mu = tape.slice(raw, 0, 2);
  g.sigma = tape.exp_fn(tape.slice(raw, 2, 2));
  g.rho = tape.tanh_fn(tape.slice(raw, 4, 1));
  return g;
}

Gaussian2D read_gaussian(const Tape& tape, const GaussianRefs& g) {
  Gaussian2D out;
  out.mu = {tape.value(g.mu).v[0], tape.value(g.mu).v[1]};
  out.sigma = {tape.value(g.sigma).v[0], tape.value(g.sigma).v[1]};
  out.rho = tape.value(g.rho).v[0];
  return out;
}

Tensor embed_value(const Tensor& w, const Tensor& b, const Tensor& input) {
  Tensor out(w.rows, 1);
  for (int r = 0; r < w.rows; ++r) {
    double acc = b.v[r];
    for (int c = 0; c < w.cols; ++c) acc += w(r, c) * input.v[c];
    out.v[r] = acc > 0.0 ? acc : 0.0;
  }
  return out;
}

LstmState lstm_step_value(const Tensor& w_x, const Tensor& w_h, const Tensor& b,
                          const Tensor& input, const LstmState& prev) {
  const int hd = w_h.cols;
  Tensor pre(4 * hd, 1);
  for (int r = 0; r < 4 * hd; ++r) {
    double acc = b.v[r];
    for (int c = 0; c < w_x.cols; ++c) acc += w_x(r, c) * input.v[c];
    for (int c = 0; c < hd; ++c) acc += w_h(r, c) * prev.h.v[c];
    pre.v[r] = acc;
  }
  auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  LstmState next{Tensor(hd, 1), Tensor(hd, 1)};
  for (int k = 0; k < hd; ++k) {
    const double i = sig(pre.v[k]);
    const double f = sig(pre.v[hd + k]);
    const double g = std::tanh(pre.v[2 * hd + k]);
    const double o = sig(pre.v[3 * hd + k]);
    next.c.v[k] = f * prev.c.v[k] + i * g;
    next.h.v[k] = o * std::tanh(next.c.v[k]);
  }
  return next;
}

Gaussian2D gaussian_head_value(const Tensor& w, const Tensor& b, const Tensor& h) {
  Tensor raw(5, 1);
  for (int r = 0; r < 5; ++r) {
    double acc = b.v[r];
    for (int c = 0; c < w.cols; ++c) acc += w(r, c) * h.v[c];
    raw.v[r] = acc;
  }
  Gaussian2D g;
  g.mu = {raw.v[0], raw.v[1]};
  g.sigma = {std::exp(raw.v[2]), std::exp(raw.v[3])};
  g.rho = std::tanh(raw.v[4]);
  return g;
}

double nll_value(Vec2 target, const Gaussian2D& g) {
  const double ax = (target.x - g.mu.x) / g.sigma.x;
  const double by = (target.y - g.mu.y) / g.sigma.y;
  const double q = std::max(1.0 - g.rho * g.rho, 1e-12);
  const double z = ax * ax + by * by - 2.0 * g.rho * ax * by;
  return std::log(2.0 * std::numbers::pi) + std::log(g.sigma.x) + std::log(g.sigma.y) +
         0.5 * std::log(q) + z / (2.0 * q);
}

}  // namespace sgnav
