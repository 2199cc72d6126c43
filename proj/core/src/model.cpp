#include "salient/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "salient/rng.hpp"

namespace salient {

std::string_view clue_mode_name(ClueMode mode) { return mode == ClueMode::kSdu ? "sdu" : "ssi"; }

ClueMode parse_clue_mode(std::string_view name) {
  if (name == "sdu") return ClueMode::kSdu;
  if (name == "ssi") return ClueMode::kSsi;
  throw std::invalid_argument("unknown clue mode: " + std::string(name));
}

std::string extension_name(ExtensionKind kind) {
  if (kind.intent && kind.style) return "intent+style";
  if (kind.intent) return "intent";
  if (kind.style) return "style";
  return "none";
}

ExtensionKind parse_extension(std::string_view name) {
  if (name == "none") return {};
  if (name == "intent") return {true, false};
  if (name == "style") return {false, true};
  if (name == "intent+style" || name == "style+intent") return {true, true};
  throw std::invalid_argument("unknown extension kind: " + std::string(name));
}

// ---------------------------------------------------------------------------
// ModelConfig

std::size_t ModelConfig::clue_width() const {
  return clue == ClueMode::kSdu ? clue_dim : ssi_capacity(Form::kQijue);
}

std::size_t ModelConfig::extension_dim() const {
  return (extension.intent ? intent_dim : 0) + (extension.style ? style_dim : 0);
}

std::size_t ModelConfig::output_input_dim() const {
  return decoder_hidden + embed_dim + state_dim() + clue_width() + extension_dim();
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw std::invalid_argument(std::string("model config: ") + name + " must be positive");
  };
  if (vocab_size <= Vocabulary::kFirstCharacter)
    throw std::invalid_argument("model config: vocab_size must exceed the reserved ids");
  positive(embed_dim, "embed_dim");
  positive(encoder_hidden, "encoder_hidden");
  positive(decoder_hidden, "decoder_hidden");
  positive(attention_dim, "attention_dim");
  positive(maxout_pieces, "maxout_pieces");
  positive(maxout_dim, "maxout_dim");
  positive(clue_dim, "clue_dim");
  positive(ssi_projection_dim, "ssi_projection_dim");
  positive(intent_dim, "intent_dim");
  positive(style_dim, "style_dim");
  if (!(init_scale >= 0.0)) throw std::invalid_argument("model config: init_scale must be >= 0");
}

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty() || v.front() == '-')
    throw std::invalid_argument("config key " + key + ": expected a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(n);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw std::invalid_argument("config key " + key + ": expected a number, got '" + v + "'");
  return x;
}

}  // namespace

std::map<std::string, std::string> ModelConfig::to_map() const {
  return {
      {"vocab_size", std::to_string(vocab_size)},
      {"embed_dim", std::to_string(embed_dim)},
      {"encoder_hidden", std::to_string(encoder_hidden)},
      {"decoder_hidden", std::to_string(decoder_hidden)},
      {"attention_dim", std::to_string(attention_dim)},
      {"maxout_pieces", std::to_string(maxout_pieces)},
      {"maxout_dim", std::to_string(maxout_dim)},
      {"clue_dim", std::to_string(clue_dim)},
      {"ssi_projection_dim", std::to_string(ssi_projection_dim)},
      {"intent_dim", std::to_string(intent_dim)},
      {"style_dim", std::to_string(style_dim)},
      {"clue", std::string(clue_mode_name(clue))},
      {"ext", extension_name(extension)},
      {"saliency", std::string(saliency_mode_name(saliency))},
      {"init_scale", format_double(init_scale)},
  };
}

void ModelConfig::apply(const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "vocab_size") vocab_size = to_size(k, v);
    else if (k == "embed_dim") embed_dim = to_size(k, v);
    else if (k == "encoder_hidden") encoder_hidden = to_size(k, v);
    else if (k == "decoder_hidden") decoder_hidden = to_size(k, v);
    else if (k == "attention_dim") attention_dim = to_size(k, v);
    else if (k == "maxout_pieces") maxout_pieces = to_size(k, v);
    else if (k == "maxout_dim") maxout_dim = to_size(k, v);
    else if (k == "clue_dim") clue_dim = to_size(k, v);
    else if (k == "ssi_projection_dim") ssi_projection_dim = to_size(k, v);
    else if (k == "intent_dim") intent_dim = to_size(k, v);
    else if (k == "style_dim") style_dim = to_size(k, v);
    else if (k == "clue") clue = parse_clue_mode(v);
    else if (k == "ext") extension = parse_extension(v);
    else if (k == "saliency") saliency = parse_saliency_mode(v);
    else if (k == "init_scale") init_scale = to_double(k, v);
  }
}

// ---------------------------------------------------------------------------
// Model

std::vector<std::pair<std::string, Shape>> Model::layout(const ModelConfig& c) {
  const std::size_t he = c.encoder_hidden, hd = c.decoder_hidden, e = c.embed_dim, v = c.vocab_size;
  std::vector<std::pair<std::string, Shape>> out = {
      {"embedding", {v, e}},
      {"encoder.fwd.W", {4 * he, e + he}},
      {"encoder.fwd.b", {4 * he}},
      {"encoder.bwd.W", {4 * he, e + he}},
      {"encoder.bwd.b", {4 * he}},
      {"decoder.W", {4 * hd, e + c.state_dim() + hd}},
      {"decoder.b", {4 * hd}},
      {"attention.W_dec", {c.attention_dim, hd}},
      {"attention.W_enc", {c.attention_dim, c.state_dim()}},
      {"attention.b", {c.attention_dim}},
      {"attention.v", {c.attention_dim}},
      {"output.maxout.W", {c.maxout_pieces * c.maxout_dim, c.output_input_dim()}},
      {"output.maxout.b", {c.maxout_pieces * c.maxout_dim}},
      {"output.W", {v, c.maxout_dim}},
      {"output.b", {v}},
  };
  if (c.clue == ClueMode::kSdu) {
    out.push_back({"clue.sdu.W", {c.clue_dim, c.clue_dim + c.state_dim()}});
    out.push_back({"clue.sdu.b", {c.clue_dim}});
  } else {
    out.push_back({"clue.ssi.W", {c.ssi_projection_dim, c.state_dim()}});
    out.push_back({"clue.ssi.b", {c.ssi_projection_dim}});
  }
  if (c.extension.intent) {
    out.push_back({"intent.W", {c.intent_dim, c.state_dim()}});
    out.push_back({"intent.b", {c.intent_dim}});
  }
  if (c.extension.style) out.push_back({"style.table", {kStyleCount, c.style_dim}});
  return out;
}

Model::Model(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  Rng rng(seed);
  for (auto& [name, shape] : layout(config_)) {
    Tensor t(shape);
    for (auto& x : t.data()) x = rng.uniform(-config_.init_scale, config_.init_scale);
    params_.add(name, std::move(t));
  }
  resolve_slots();
}

Model::Model(ModelConfig config, ParameterSet params) : config_(std::move(config)), params_(std::move(params)) {
  config_.validate();
  auto expected = layout(config_);
  if (expected.size() != params_.size())
    throw std::invalid_argument("model: expected " + std::to_string(expected.size()) + " parameters, got " +
                                std::to_string(params_.size()));
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (params_.name(i) != expected[i].first || params_[i].shape() != expected[i].second)
      throw std::invalid_argument("model: parameter " + std::to_string(i) + " is " + params_.name(i) + " " +
                                  shape_string(params_[i].shape()) + ", expected " + expected[i].first + " " +
                                  shape_string(expected[i].second));
  }
  resolve_slots();
}

void Model::resolve_slots() {
  const auto& p = params_;
  slots_.embedding = p.slot("embedding");
  slots_.enc_fwd_w = p.slot("encoder.fwd.W");
  slots_.enc_fwd_b = p.slot("encoder.fwd.b");
  slots_.enc_bwd_w = p.slot("encoder.bwd.W");
  slots_.enc_bwd_b = p.slot("encoder.bwd.b");
  slots_.dec_w = p.slot("decoder.W");
  slots_.dec_b = p.slot("decoder.b");
  slots_.att_dec = p.slot("attention.W_dec");
  slots_.att_enc = p.slot("attention.W_enc");
  slots_.att_b = p.slot("attention.b");
  slots_.att_v = p.slot("attention.v");
  slots_.maxout_w = p.slot("output.maxout.W");
  slots_.maxout_b = p.slot("output.maxout.b");
  slots_.out_w = p.slot("output.W");
  slots_.out_b = p.slot("output.b");
  if (config_.clue == ClueMode::kSdu) {
    slots_.clue_w = p.slot("clue.sdu.W");
    slots_.clue_b = p.slot("clue.sdu.b");
  } else {
    slots_.clue_w = p.slot("clue.ssi.W");
    slots_.clue_b = p.slot("clue.ssi.b");
  }
  if (config_.extension.intent) {
    slots_.intent_w = p.slot("intent.W");
    slots_.intent_b = p.slot("intent.b");
  }
  if (config_.extension.style) slots_.style_table = p.slot("style.table");
}

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(const Model& model) : model_(model), tape_(&model.params()) {}

ad::Var Graph::zeros(std::size_t n) { return tape_.constant(Tensor({n}, 0.0)); }

ad::Var Graph::embed(TokenId id) {
  if (id >= model_.config().vocab_size)
    throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary of " +
                            std::to_string(model_.config().vocab_size));
  return tape_.row(p(model_.slots().embedding), id);
}

ad::Var Graph::lstm_cell(ad::Var w, ad::Var b, ad::Var input, DecoderState& state, std::size_t hidden) {
  const ad::Var xs[] = {input, state.hidden};
  auto z = tape_.add(tape_.matmul(w, tape_.concat(xs)), b);
  auto i = tape_.sigmoid(tape_.slice(z, 0, hidden));
  auto f = tape_.sigmoid(tape_.slice(z, hidden, 2 * hidden));
  auto g = tape_.tanh(tape_.slice(z, 2 * hidden, 3 * hidden));
  auto o = tape_.sigmoid(tape_.slice(z, 3 * hidden, 4 * hidden));
  state.cell = tape_.add(tape_.mul(f, state.cell), tape_.mul(i, g));
  state.hidden = tape_.mul(o, tape_.tanh(state.cell));
  return state.hidden;
}

std::vector<ad::Var> Graph::encode(std::span<const TokenId> line) {
  if (line.empty()) throw std::invalid_argument("encode: empty line");
  const auto& s = model_.slots();
  const std::size_t h = model_.config().encoder_hidden;
  const std::size_t t = line.size();
  std::vector<ad::Var> emb(t), fwd(t), bwd(t);
  for (std::size_t i = 0; i < t; ++i) emb[i] = embed(line[i]);

  DecoderState f{zeros(h), zeros(h)};
  for (std::size_t i = 0; i < t; ++i) fwd[i] = lstm_cell(p(s.enc_fwd_w), p(s.enc_fwd_b), emb[i], f, h);
  DecoderState b{zeros(h), zeros(h)};
  for (std::size_t i = t; i-- > 0;) bwd[i] = lstm_cell(p(s.enc_bwd_w), p(s.enc_bwd_b), emb[i], b, h);

  std::vector<ad::Var> states(t);
  for (std::size_t i = 0; i < t; ++i) {
    const ad::Var parts[] = {fwd[i], bwd[i]};
    states[i] = tape_.concat(parts);
  }
  return states;
}

EncodedSource Graph::prepare(std::vector<ad::Var> states) {
  const auto& s = model_.slots();
  EncodedSource src;
  src.keys.reserve(states.size());
  for (auto h : states) src.keys.push_back(tape_.add(tape_.matmul(p(s.att_enc), h), p(s.att_b)));
  src.states = std::move(states);
  return src;
}

DecoderState Graph::initial_state() {
  const std::size_t h = model_.config().decoder_hidden;
  return {zeros(h), zeros(h)};
}

StepOutput Graph::decode_step(const DecoderState& prev, TokenId prev_char, const EncodedSource& source,
                              const SalientClueState& clue, const ExtensionVector& ext) {
  const auto& cfg = model_.config();
  const auto& s = model_.slots();
  if (source.length() == 0) throw std::invalid_argument("decode_step: empty source");
  if (ext.kind != cfg.extension || ext.dimension != cfg.extension_dim())
    throw std::invalid_argument("decode_step: extension '" + extension_name(ext.kind) + "' of dim " +
                                std::to_string(ext.dimension) + " does not match configured '" +
                                extension_name(cfg.extension) + "' of dim " + std::to_string(cfg.extension_dim()));
  if (clue.mode != cfg.clue)
    throw std::invalid_argument("decode_step: clue mode does not match the model configuration");

  StepOutput out;
  // additive attention keyed by the previous decoder state
  auto query = tape_.matmul(p(s.att_dec), prev.hidden);
  std::vector<ad::Var> hidden_rows;
  hidden_rows.reserve(source.length());
  for (auto key : source.keys) hidden_rows.push_back(tape_.tanh(tape_.add(query, key)));
  auto energies = tape_.matmul(tape_.stack(hidden_rows), p(s.att_v));
  out.attention = tape_.softmax(energies);
  out.context = tape_.weighted_sum(out.attention, source.states);

  auto emb = embed(prev_char);
  const ad::Var lstm_in[] = {emb, out.context};
  out.state = prev;
  lstm_cell(p(s.dec_w), p(s.dec_b), tape_.concat(lstm_in), out.state, cfg.decoder_hidden);

  std::vector<ad::Var> features = {out.state.hidden, emb, out.context, clue_input(clue)};
  if (ext.value.valid()) features.push_back(ext.value);
  auto pieces = tape_.add(tape_.matmul(p(s.maxout_w), tape_.concat(features)), p(s.maxout_b));
  auto hidden = tape_.max_pieces(pieces, cfg.maxout_pieces);
  out.logits = tape_.add(tape_.matmul(p(s.out_w), hidden), p(s.out_b));
  return out;
}

SalientClueState Graph::initial_clue(Form form) {
  const auto& cfg = model_.config();
  SalientClueState st;
  st.mode = cfg.clue;
  if (cfg.clue == ClueMode::kSdu) {
    st.dimension = cfg.clue_dim;
    st.vector = zeros(cfg.clue_dim);
  } else {
    st.capacity = cfg.ssi_capacity(form);
    st.dimension = st.capacity;
  }
  return st;
}

ad::Var Graph::clue_input(const SalientClueState& clue) {
  const auto& cfg = model_.config();
  if (clue.mode == ClueMode::kSdu) return clue.vector;
  std::vector<ad::Var> parts = clue.slots;
  const std::size_t width = cfg.clue_width();
  if (clue.cursor < width) parts.push_back(zeros(width - clue.cursor));
  return tape_.concat(parts);
}

ad::Var Graph::saliency(std::span<const ad::Var> attention_rows, std::span<const double> w_in,
                        std::span<const double> w_out, SaliencyMode mode) {
  if (attention_rows.empty()) throw std::invalid_argument("saliency: no attention rows");
  const std::size_t t_out = attention_rows.size();
  if (mode == SaliencyMode::kNaive) {
    auto col = tape_.weighted_sum(tape_.constant(Tensor({t_out}, 1.0)), attention_rows);
    return tape_.div(col, tape_.sum(col));
  }
  const std::size_t t_in = value(attention_rows[0]).size();
  if (w_out.size() != t_out || w_in.size() != t_in)
    throw ShapeError("saliency: weight lengths (in " + std::to_string(w_in.size()) + ", out " +
                     std::to_string(w_out.size()) + ") do not match alignment [" + std::to_string(t_out) + "x" +
                     std::to_string(t_in) + "]");
  auto weighted = tape_.weighted_sum(tape_.constant(Tensor::vector({w_out.begin(), w_out.end()})), attention_rows);
  return tape_.mul(weighted, tape_.constant(Tensor::vector({w_in.begin(), w_in.end()})));
}

SalientClueState Graph::update_clue_sdu(const SalientClueState& state, const Selection& selection, ad::Var scores,
                                        std::span<const ad::Var> encoder_states) {
  if (state.mode != ClueMode::kSdu) throw std::invalid_argument("update_clue_sdu: state is not SDU");
  for (auto m : selection.indices)
    if (m >= encoder_states.size())
      throw std::out_of_range("update_clue_sdu: index " + std::to_string(m) + " outside source of length " +
                              std::to_string(encoder_states.size()));
  if (selection.count() == 0) return state;

  const auto& s = model_.slots();
  std::vector<ad::Var> picked;
  for (auto m : selection.indices) picked.push_back(encoder_states[m]);
  auto weights = tape_.gather(scores, selection.indices);
  auto total = tape_.sum(weights);
  ad::Var merged;
  if (value(total)[0] > 0.0) {
    merged = tape_.div(tape_.weighted_sum(weights, picked), total);
  } else {
    merged = tape_.mean(picked);  // all selected scores zero
  }
  const ad::Var xs[] = {state.vector, merged};
  SalientClueState next = state;
  next.vector = tape_.tanh(tape_.add(tape_.matmul(p(s.clue_w), tape_.concat(xs)), p(s.clue_b)));
  next.line_index = state.line_index + 1;
  return next;
}

SalientClueState Graph::update_clue_ssi(const SalientClueState& state, const Selection& selection,
                                        std::span<const ad::Var> encoder_states) {
  if (state.mode != ClueMode::kSsi) throw std::invalid_argument("update_clue_ssi: state is not SSI");
  const std::size_t proj = model_.config().ssi_projection_dim;
  if (state.cursor + proj * selection.count() > state.capacity)
    throw std::length_error("update_clue_ssi: " + std::to_string(selection.count()) +
                            " selections overflow the clue (cursor " + std::to_string(state.cursor) + ", capacity " +
                            std::to_string(state.capacity) + ")");
  for (auto m : selection.indices)
    if (m >= encoder_states.size())
      throw std::out_of_range("update_clue_ssi: index " + std::to_string(m) + " outside source of length " +
                              std::to_string(encoder_states.size()));
  if (selection.count() == 0) return state;

  const auto& s = model_.slots();
  SalientClueState next = state;
  for (auto m : selection.indices) {
    next.slots.push_back(tape_.tanh(tape_.add(tape_.matmul(p(s.clue_w), encoder_states[m]), p(s.clue_b))));
    next.cursor += proj;
  }
  next.line_index = state.line_index + 1;
  return next;
}

SalientClueState Graph::update_clue(const SalientClueState& state, const Selection& selection, ad::Var scores,
                                    std::span<const ad::Var> encoder_states) {
  return state.mode == ClueMode::kSdu ? update_clue_sdu(state, selection, scores, encoder_states)
                                      : update_clue_ssi(state, selection, encoder_states);
}

SalientClueState Graph::detach(const SalientClueState& state) {
  SalientClueState out = state;
  if (state.vector.valid()) out.vector = tape_.constant(value(state.vector));
  for (auto& slot : out.slots) slot = tape_.constant(value(slot));
  return out;
}

ad::Var Graph::intent_vector(std::span<const ad::Var> keyword_states) {
  if (!model_.config().extension.intent) throw std::logic_error("intent_vector: model has no intent extension");
  if (keyword_states.empty()) throw std::invalid_argument("intent_vector: empty keyword");
  const auto& s = model_.slots();
  auto avg = tape_.mean(keyword_states);
  return tape_.tanh(tape_.add(tape_.matmul(p(s.intent_w), avg), p(s.intent_b)));
}

ad::Var Graph::intent_vector(std::span<const TokenId> keyword) {
  if (keyword.empty()) throw std::invalid_argument("intent_vector: empty keyword");
  auto states = encode(keyword);
  return intent_vector(states);
}

ad::Var Graph::style_vector(std::size_t style_id) {
  if (!model_.config().extension.style) throw std::logic_error("style_vector: model has no style extension");
  if (style_id >= kStyleCount) throw std::out_of_range("style_vector: unknown style id " + std::to_string(style_id));
  return tape_.row(p(model_.slots().style_table), style_id);
}

ExtensionVector Graph::extension(ad::Var intent, ad::Var style) {
  const auto& cfg = model_.config();
  ExtensionVector e;
  e.kind = cfg.extension;
  e.dimension = cfg.extension_dim();
  std::vector<ad::Var> parts;
  if (cfg.extension.intent) {
    if (!intent.valid()) throw std::invalid_argument("extension: model expects an intent vector");
    parts.push_back(intent);
  }
  if (cfg.extension.style) {
    if (!style.valid()) throw std::invalid_argument("extension: model expects a style vector");
    parts.push_back(style);
  }
  if (!parts.empty()) e.value = parts.size() == 1 ? parts[0] : tape_.concat(parts);
  return e;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double x : logits) z += std::exp(x - mx);
  const double lz = mx + std::log(z);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lz;
  return out;
}

}  // namespace salient
