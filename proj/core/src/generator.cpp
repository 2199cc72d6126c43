#include "salient/generator.hpp"

#include <algorithm>

namespace salient {

ToneTemplate make_template(std::string name, const std::array<std::string_view, kLinesPerPoem>& lines) {
  ToneTemplate t;
  t.name = std::move(name);
  for (std::size_t i = 0; i < kLinesPerPoem; ++i) {
    for (char c : lines[i]) {
      switch (c) {
        case 'P': t.lines[i].push_back(TemplateTone::kPing); break;
        case 'Z': t.lines[i].push_back(TemplateTone::kZe); break;
        case '*': t.lines[i].push_back(TemplateTone::kAny); break;
        default: throw std::invalid_argument(std::string("template symbol must be P, Z or *, got ") + c);
      }
    }
    if (t.lines[i].size() != lines[0].size()) throw std::invalid_argument("template lines differ in length");
  }
  return t;
}

PatternTable PatternTable::standard() {
  PatternTable table;
  // Wujue: positions 1 and 3 are free.
  table.add(Form::kWujue, make_template("wujue-ze-start", {"*Z*PZ", "*P*ZP", "*P*ZZ", "*Z*PP"}));
  table.add(Form::kWujue, make_template("wujue-ze-start-rhymed", {"*Z*ZP", "*P*ZP", "*P*ZZ", "*Z*PP"}));
  table.add(Form::kWujue, make_template("wujue-ping-start", {"*P*ZZ", "*Z*PP", "*Z*PZ", "*P*ZP"}));
  table.add(Form::kWujue, make_template("wujue-ping-start-rhymed", {"*P*ZP", "*Z*PP", "*Z*PZ", "*P*ZP"}));
  // Qijue: positions 1, 3 and 5 are free.
  table.add(Form::kQijue, make_template("qijue-ping-start-rhymed", {"*P*Z*PP", "*Z*P*ZP", "*Z*P*ZZ", "*P*Z*PP"}));
  table.add(Form::kQijue, make_template("qijue-ze-start-rhymed", {"*Z*P*ZP", "*P*Z*PP", "*P*Z*PZ", "*Z*P*ZP"}));
  table.add(Form::kQijue, make_template("qijue-ping-start", {"*P*Z*PZ", "*Z*P*ZP", "*Z*P*ZZ", "*P*Z*PP"}));
  table.add(Form::kQijue, make_template("qijue-ze-start", {"*Z*P*ZZ", "*P*Z*PP", "*P*Z*PZ", "*Z*P*ZP"}));
  return table;
}

void PatternTable::add(Form form, ToneTemplate tpl) {
  if (tpl.lines[0].size() != line_length(form))
    throw std::invalid_argument("template " + tpl.name + " does not match the form's line length");
  (form == Form::kWujue ? wujue_ : qijue_).push_back(std::move(tpl));
}

std::span<const ToneTemplate> PatternTable::templates(Form form) const {
  return form == Form::kWujue ? std::span<const ToneTemplate>(wujue_) : std::span<const ToneTemplate>(qijue_);
}

bool tone_allows(TemplateTone required, Tone actual) {
  if (required == TemplateTone::kAny || actual == Tone::kUnknown) return true;
  return (required == TemplateTone::kPing) == (actual == Tone::kPing);
}

namespace {

ToneEntry entry(std::span<const ToneEntry> tones, TokenId id) { return id < tones.size() ? tones[id] : ToneEntry{}; }

bool prefix_matches(std::span<const TokenId> chars, std::size_t upto, std::span<const TemplateTone> pattern,
                    std::span<const ToneEntry> tones) {
  if (upto >= pattern.size()) return false;
  for (std::size_t i = 0; i <= upto; ++i)
    if (!tone_allows(pattern[i], entry(tones, chars[i]).tone)) return false;
  return true;
}

bool rhymes(std::optional<int> a, std::optional<int> b) { return !a || !b || *a == *b; }

}  // namespace

bool line_matches(std::span<const TokenId> line, std::span<const TemplateTone> pattern,
                  std::span<const ToneEntry> tones) {
  return line.size() == pattern.size() && !line.empty() && prefix_matches(line, line.size() - 1, pattern, tones);
}

FormReport check_form(const std::array<std::vector<TokenId>, kLinesPerPoem>& lines, Form form,
                      std::span<const ToneEntry> tones, const PatternTable& patterns) {
  FormReport rep;
  const auto t = line_length(form);
  rep.length_ok = std::all_of(lines.begin(), lines.end(), [&](const auto& l) { return l.size() == t; });
  if (!rep.length_ok) return rep;

  auto tpls = patterns.templates(form);
  for (std::size_t k = 0; k < tpls.size() && !rep.tone_ok; ++k) {
    bool all = true;
    for (std::size_t i = 0; i < kLinesPerPoem && all; ++i) all = line_matches(lines[i], tpls[k].lines[i], tones);
    if (all) {
      rep.tone_ok = true;
      rep.template_index = k;
    }
  }
  const auto g2 = entry(tones, lines[1].back()).rhyme_group;
  const auto g4 = entry(tones, lines[3].back()).rhyme_group;
  rep.rhyme_ok = rhymes(g2, g4);
  const auto g1 = entry(tones, lines[0].back()).rhyme_group;
  rep.first_line_rhymes = g1 && (g2 || g4) && rhymes(g1, g2) && rhymes(g1, g4);
  return rep;
}

std::vector<Hypothesis> prune_beam(std::vector<Hypothesis> hypotheses, std::size_t position,
                                   const LineConstraint& constraint, std::span<const ToneEntry> tones) {
  std::vector<Hypothesis> out;
  out.reserve(hypotheses.size());
  for (auto& h : hypotheses) {
    if (h.chars.size() <= position) continue;
    bool ok = constraint.candidates.empty();
    for (const auto& pattern : constraint.candidates) {
      if (prefix_matches(h.chars, position, pattern, tones)) {
        ok = true;
        break;
      }
    }
    if (ok && constraint.rhyme_group && !constraint.candidates.empty() &&
        position + 1 == constraint.candidates.front().size())
      ok = rhymes(constraint.rhyme_group, entry(tones, h.chars[position]).rhyme_group);
    if (ok) out.push_back(std::move(h));
  }
  return out;
}

void sort_beam(std::vector<Hypothesis>& beam) {
  std::stable_sort(beam.begin(), beam.end(), [](const Hypothesis& a, const Hypothesis& b) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    return a.chars < b.chars;
  });
}

std::vector<Hypothesis> beam_search_line(Graph& graph, const EncodedSource& source, const SalientClueState& clue,
                                         const ExtensionVector& ext, std::size_t length, std::size_t beam_width,
                                         const LineConstraint* constraint, std::span<const ToneEntry> tones) {
  if (beam_width == 0) throw std::invalid_argument("beam width must be >= 1");
  const std::size_t vocab = graph.model().config().vocab_size;
  std::vector<Hypothesis> beam(1);
  beam[0].state = graph.initial_state();
  for (std::size_t pos = 0; pos < length; ++pos) {
    std::vector<Hypothesis> candidates;
    candidates.reserve(beam.size() * vocab);
    for (const auto& h : beam) {
      const TokenId prev = h.chars.empty() ? Vocabulary::kBos : h.chars.back();
      auto step = graph.decode_step(h.state, prev, source, clue, ext);
      const auto lp = log_softmax(graph.value(step.logits).data());
      for (TokenId c = Vocabulary::kFirstCharacter; c < vocab; ++c) {
        Hypothesis next;
        next.chars = h.chars;
        next.chars.push_back(c);
        next.log_prob = h.log_prob + lp[c];
        next.state = step.state;
        next.attention = h.attention;
        next.attention.push_back(step.attention);
        candidates.push_back(std::move(next));
      }
    }
    if (constraint) candidates = prune_beam(std::move(candidates), pos, *constraint, tones);
    sort_beam(candidates);
    if (candidates.size() > beam_width) candidates.resize(beam_width);
    beam = std::move(candidates);
    if (beam.empty()) break;
  }
  return beam;
}

GeneratedPoem generate_poem(const GenerationContext& ctx, std::span<const TokenId> keyword,
                            const GenerateOptions& options) {
  const auto& cfg = ctx.model.config();
  if (keyword.empty()) throw std::invalid_argument("generate_poem: empty keyword");
  if (options.constraints && (!ctx.lexicon || !ctx.patterns))
    throw std::invalid_argument("generate_poem: constraints need a tone lexicon and pattern table");
  if (ctx.vocab.size() != cfg.vocab_size) throw std::invalid_argument("generate_poem: vocabulary does not match model");

  const std::size_t t = line_length(options.form);
  std::vector<ToneEntry> tones;
  if (ctx.lexicon) tones = ctx.lexicon->by_token(ctx.vocab);
  std::span<const ToneTemplate> tpls;
  if (options.constraints) {
    tpls = ctx.patterns->templates(options.form);
    if (tpls.empty()) throw std::invalid_argument("generate_poem: no tone templates for this form");
  }

  Graph graph(ctx.model);
  GeneratedPoem out;
  out.keyword.assign(keyword.begin(), keyword.end());
  out.poem.form = options.form;
  out.poem.keyword = out.keyword;
  out.poem.style = options.style;

  EncodedSource source = graph.encode_source(keyword);
  ad::Var intent, style;
  if (cfg.extension.intent) intent = graph.intent_vector(source.states);
  if (cfg.extension.style) style = graph.style_vector(static_cast<std::size_t>(options.style.value_or(Style::kNone)));
  const ExtensionVector ext = graph.extension(intent, style);
  SalientClueState clue = graph.initial_clue(options.form);

  const ToneTemplate* chosen = nullptr;
  std::optional<int> rhyme_group;
  for (std::size_t li = 0; li < kLinesPerPoem; ++li) {
    LineConstraint constraint;
    if (options.constraints) {
      if (li == 0) {
        for (const auto& tpl : tpls) constraint.candidates.push_back(tpl.lines[0]);
      } else {
        constraint.candidates.push_back(chosen->lines[li]);
        if (li == 3) constraint.rhyme_group = rhyme_group;
      }
    }
    auto beam = beam_search_line(graph, source, clue, ext, t, options.beam,
                                 options.constraints ? &constraint : nullptr, tones);
    if (beam.empty()) throw BeamExhausted(li, chosen ? chosen->name : std::string("any"));
    const Hypothesis& best = beam.front();
    out.poem.lines[li] = best.chars;
    out.line_log_probs.push_back(best.log_prob);
    out.log_prob += best.log_prob;

    if (options.constraints && li == 0) {
      for (const auto& tpl : tpls)
        if (line_matches(best.chars, tpl.lines[0], tones)) {
          chosen = &tpl;
          break;
        }
      out.template_name = chosen->name;
    }
    if (options.constraints && li == 1 && best.chars.back() < tones.size())
      rhyme_group = tones[best.chars.back()].rhyme_group;

    if (li >= 1) {
      std::vector<double> w_in, w_out;
      if (cfg.saliency == SaliencyMode::kTfIdf) {
        w_in = tfidf_line(out.poem.lines[li - 1], out.poem, ctx.tfidf, options.tf_scope);
        w_out = tfidf_line(best.chars, out.poem, ctx.tfidf, options.tf_scope);
      }
      auto r = graph.saliency(best.attention, w_in, w_out, cfg.saliency);
      const auto& rv = graph.value(r);
      LineSaliency ls;
      ls.line = li;
      ls.source_line = li - 1;
      ls.scores.assign(rv.data().begin(), rv.data().end());
      ls.selection = select_salient(ls.scores, max_salient(options.form));
      clue = graph.update_clue(clue, ls.selection, r, source.states);
      out.saliency.push_back(std::move(ls));
    }
    source = graph.encode_source(best.chars);
  }
  if (ctx.lexicon && ctx.patterns) out.form_check = check_form(out.poem, tones, *ctx.patterns);
  return out;
}

}  // namespace salient
