#pragma once

// Attentive encoder-decoder with a salient clue.
//
// The encoder is a bidirectional LSTM whose per-position state is the
// concatenation of both directions. The decoder LSTM consumes
// [emb(y_{t-1}); c_t] where c_t is additive attention over the encoder
// states keyed by the previous decoder state. The output layer is maxout over
// [h'_t; emb(y_{t-1}); c_t; v; e] followed by a softmax over the vocabulary,
// where v is the salient clue and e the optional extension vector.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salient/autodiff.hpp"
#include "salient/corpus.hpp"
#include "salient/parameters.hpp"
#include "salient/saliency.hpp"

namespace salient {

enum class ClueMode { kSdu, kSsi };
std::string_view clue_mode_name(ClueMode mode);
ClueMode parse_clue_mode(std::string_view name);

struct ExtensionKind {
  bool intent = false;
  bool style = false;

  friend bool operator==(const ExtensionKind&, const ExtensionKind&) = default;
};
std::string extension_name(ExtensionKind kind);
ExtensionKind parse_extension(std::string_view name);

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 256;
  std::size_t encoder_hidden = 256;  // per direction; h_t has twice this
  std::size_t decoder_hidden = 512;
  std::size_t attention_dim = 512;
  std::size_t maxout_pieces = 2;
  std::size_t maxout_dim = 512;
  std::size_t clue_dim = 512;          // SDU clue width
  std::size_t ssi_projection_dim = 100;
  std::size_t intent_dim = 128;
  std::size_t style_dim = 64;
  ClueMode clue = ClueMode::kSsi;
  ExtensionKind extension;
  SaliencyMode saliency = SaliencyMode::kTfIdf;
  double init_scale = 0.08;

  std::size_t state_dim() const { return 2 * encoder_hidden; }
  /// SSI clue capacity for one form: projection * (lines - 1) * K.
  std::size_t ssi_capacity(Form form) const { return ssi_projection_dim * (kLinesPerPoem - 1) * max_salient(form); }
  /// Width of the clue block of the output layer (SSI uses the largest form).
  std::size_t clue_width() const;
  std::size_t extension_dim() const;
  std::size_t output_input_dim() const;

  void validate() const;

  /// Flat key/value view, used for checkpoint manifests and config files.
  std::map<std::string, std::string> to_map() const;
  /// Applies recognised keys from `kv`; unknown keys are left untouched.
  void apply(const std::map<std::string, std::string>& kv);
};

/// Owns the parameters; slot indices are resolved once at construction.
class Model {
 public:
  /// Uniform(-init_scale, init_scale) initialisation from `seed`.
  Model(ModelConfig config, std::uint64_t seed);
  /// Adopts existing parameters; names and shapes must match the config.
  Model(ModelConfig config, ParameterSet params);

  const ModelConfig& config() const { return config_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

  struct Slots {
    std::size_t embedding;
    std::size_t enc_fwd_w, enc_fwd_b, enc_bwd_w, enc_bwd_b;
    std::size_t dec_w, dec_b;
    std::size_t att_dec, att_enc, att_b, att_v;
    std::size_t maxout_w, maxout_b;
    std::size_t out_w, out_b;
    std::size_t clue_w = 0, clue_b = 0;     // SDU merge layer or SSI projection
    std::size_t intent_w = 0, intent_b = 0;
    std::size_t style_table = 0;
  };
  const Slots& slots() const { return slots_; }

  /// Expected parameter names and shapes for `config`, in slot order.
  static std::vector<std::pair<std::string, Shape>> layout(const ModelConfig& config);

 private:
  void resolve_slots();

  ModelConfig config_;
  ParameterSet params_;
  Slots slots_{};
};

struct DecoderState {
  ad::Var hidden;
  ad::Var cell;
};

/// Encoder output prepared for attention: states plus their attention keys.
struct EncodedSource {
  std::vector<ad::Var> states;
  std::vector<ad::Var> keys;
  std::size_t length() const { return states.size(); }
};

struct StepOutput {
  DecoderState state;     // h'_t, cell
  ad::Var context;        // c_t
  ad::Var attention;      // alignment row over source positions
  ad::Var logits;         // pre-softmax scores over the vocabulary
};

/// Salient clue v. SDU keeps a fixed-width vector; SSI appends projected
/// states into zero-padded slots of a per-form capacity.
struct SalientClueState {
  ClueMode mode = ClueMode::kSdu;
  std::size_t line_index = 0;   // number of updates applied
  ad::Var vector;               // SDU only
  std::vector<ad::Var> slots;   // SSI only, each ssi_projection_dim wide
  std::size_t cursor = 0;       // SSI fill cursor in scalars
  std::size_t capacity = 0;     // SSI capacity in scalars
  std::size_t dimension = 0;    // width of v

};

struct ExtensionVector {
  ExtensionKind kind;
  ad::Var value;  // invalid when kind has neither part
  std::size_t dimension = 0;
};

/// Forward-pass builder binding one tape to a model. Single-threaded.
class Graph {
 public:
  explicit Graph(const Model& model);

  ad::Tape& tape() { return tape_; }
  const ad::Tape& tape() const { return tape_; }
  const Model& model() const { return model_; }
  const Tensor& value(ad::Var v) const { return tape_.value(v); }

  /// Bidirectional encoder states, each of width 2 * encoder_hidden.
  std::vector<ad::Var> encode(std::span<const TokenId> line);
  EncodedSource prepare(std::vector<ad::Var> states);
  EncodedSource encode_source(std::span<const TokenId> line) { return prepare(encode(line)); }

  DecoderState initial_state();
  StepOutput decode_step(const DecoderState& prev, TokenId prev_char, const EncodedSource& source,
                         const SalientClueState& clue, const ExtensionVector& ext);

  SalientClueState initial_clue(Form form);
  /// Width-padded clue vector fed to the output layer.
  ad::Var clue_input(const SalientClueState& clue);

  /// Differentiable saliency over attention rows; w_in/w_out only used in tf-idf mode.
  ad::Var saliency(std::span<const ad::Var> attention_rows, std::span<const double> w_in,
                   std::span<const double> w_out, SaliencyMode mode);

  /// s = sum r_m h_m / sum r_m; v = tanh(W [v; s] + b). N = 0 leaves the state unchanged.
  SalientClueState update_clue_sdu(const SalientClueState& state, const Selection& selection, ad::Var scores,
                                   std::span<const ad::Var> encoder_states);
  /// Appends tanh(W h_m + b) for each selected m at the fill cursor.
  SalientClueState update_clue_ssi(const SalientClueState& state, const Selection& selection,
                                   std::span<const ad::Var> encoder_states);
  SalientClueState update_clue(const SalientClueState& state, const Selection& selection, ad::Var scores,
                               std::span<const ad::Var> encoder_states);
  /// Copies the clue into constants so no gradient crosses it.
  SalientClueState detach(const SalientClueState& state);

  /// tanh(W mean(encoder states of keyword) + b).
  ad::Var intent_vector(std::span<const ad::Var> keyword_states);
  ad::Var intent_vector(std::span<const TokenId> keyword);
  ad::Var style_vector(std::size_t style_id);
  /// Extension vector matching the model configuration.
  ExtensionVector extension(ad::Var intent, ad::Var style);
  ExtensionVector no_extension() const { return ExtensionVector{}; }

 private:
  ad::Var p(std::size_t slot) { return tape_.param(slot); }
  ad::Var lstm_cell(ad::Var w, ad::Var b, ad::Var input, DecoderState& state, std::size_t hidden);
  ad::Var embed(TokenId id);
  ad::Var zeros(std::size_t n);

  const Model& model_;
  ad::Tape tape_;
};

/// Numeric log-softmax of a logit vector.
std::vector<double> log_softmax(std::span<const double> logits);

}  // namespace salient
