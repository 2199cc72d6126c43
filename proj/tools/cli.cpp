#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "salient/chain.hpp"
#include "salient/eval.hpp"
#include "salient/generator.hpp"
#include "salient/trainer.hpp"
#include "salient/utf8.hpp"

namespace salient::cli {

namespace {

using nlohmann::json;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string join_indices(std::span<const std::size_t> idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i]);
  return s;
}

std::vector<std::string> content_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(line);
  }
  return out;
}

std::array<std::u32string, kLinesPerPoem> split_poem(const std::string& text) {
  const auto first = text.substr(0, text.find('\t'));
  std::array<std::u32string, kLinesPerPoem> lines;
  std::size_t i = 0, start = 0;
  for (;;) {
    auto bar = first.find('|', start);
    if (i == kLinesPerPoem) throw ValidationError("poem has more than 4 lines: " + text);
    lines[i++] = utf8::decode(first.substr(start, bar == std::string::npos ? std::string::npos : bar - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  if (i != kLinesPerPoem) throw ValidationError("poem needs 4 lines separated by '|': " + text);
  return lines;
}

/// Poems from generator JSON-lines output or from "l1|l2|l3|l4" text lines.
std::vector<std::array<std::u32string, kLinesPerPoem>> read_poems(const std::filesystem::path& path) {
  std::vector<std::array<std::u32string, kLinesPerPoem>> poems;
  for (const auto& line : content_lines(read_file(path))) {
    if (line.front() == '{') {
      const auto rec = json::parse(line);
      const auto& ls = rec.at("lines");
      if (ls.size() != kLinesPerPoem) throw ValidationError("generated record does not have 4 lines");
      std::array<std::u32string, kLinesPerPoem> p;
      for (std::size_t i = 0; i < kLinesPerPoem; ++i) p[i] = utf8::decode(ls[i].get<std::string>());
      poems.push_back(std::move(p));
    } else {
      poems.push_back(split_poem(line));
    }
  }
  return poems;
}

Poem encode_checked(const RawPoem& raw, const Vocabulary& vocab) {
  for (const auto& line : raw.lines)
    for (char32_t c : line)
      if (!vocab.find(c)) throw ValidationError("character " + utf8::encode(c) + " is not in the checkpoint vocabulary");
  return to_poem(raw, vocab);
}

RawPoem poem_argument(const std::string& value) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(value, ec)) {
    auto lines = content_lines(read_file(value));
    if (lines.empty()) throw ValidationError("no poem in " + value);
    return parse_poem_text(lines.front());
  }
  return parse_poem_text(value);
}

TfScope checkpoint_scope(const Checkpoint& ck) {
  auto it = ck.config.find("tf_scope");
  return it == ck.config.end() ? TfScope::kLine : parse_tf_scope(it->second);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

// ---------------------------------------------------------------- options

struct Options {
  std::string corpus, config, checkpoint, out, style, form = "wujue", clue, ext, constraints, lexicon, loss_csv;
  std::string poem, generated, references, annotations;
  std::vector<std::string> keywords;
  std::size_t beam = 20;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
};

const std::vector<std::string> kStyles = {"pastoral", "battlefield", "romantic", "none"};
const std::vector<std::string> kForms = {"wujue", "qijue"};
const std::vector<std::string> kClues = {"sdu", "ssi"};
const std::vector<std::string> kExts = {"none", "intent", "style", "intent+style"};
const std::vector<std::string> kSwitch = {"on", "off"};

// ---------------------------------------------------------------- commands

RunConfig load_run_config(const Options& o) {
  KeyValues kv;
  if (!o.config.empty()) kv = load_key_values(o.config);
  auto rc = RunConfig::from(kv);
  if (o.seed) rc.train.seed = *o.seed;
  if (o.jobs) rc.train.jobs = *o.jobs;
  if (!o.clue.empty()) rc.model.clue = parse_clue_mode(o.clue);
  if (!o.ext.empty()) rc.model.extension = parse_extension(o.ext);
  rc.train.validate();
  return rc;
}

void write_curve(const Options& o, std::span<const LossPoint> curve) {
  if (o.loss_csv.empty()) return;
  std::ostringstream csv;
  write_loss_csv(csv, curve);
  write_text(o.loss_csv, csv.str());
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  auto rc = load_run_config(o);
  auto corpus = load_corpus(o.corpus, {rc.train.validation_count, false});
  for (const auto& issue : corpus.rejected)
    err << "rejected poem " << issue.poem_index << " (file line " << issue.source_line << "): " << issue.message << '\n';
  auto result = train(corpus, rc);
  rc.model.vocab_size = corpus.vocab.size();
  save_checkpoint(o.out, Checkpoint{std::move(result.model), corpus.vocab, std::move(result.tfidf), rc.echo()});
  write_curve(o, result.curve);
  out << "trained " << corpus.train.size() << " poems, " << result.curve.size() << " steps";
  if (!result.curve.empty()) out << ", final loss " << fixed(result.curve.back().train_loss, 6) << " nats/char";
  out << "\ncheckpoint written to " << o.out << '\n';
  return kOk;
}

int cmd_finetune(const Options& o, std::ostream& out, std::ostream& err) {
  auto base = load_checkpoint(o.checkpoint);
  KeyValues kv;
  if (!o.config.empty()) kv = load_key_values(o.config);
  auto rc = RunConfig::from(kv);
  if (o.seed) rc.train.seed = *o.seed;
  if (o.jobs) rc.train.jobs = *o.jobs;
  rc.train.validate();

  std::vector<CorpusIssue> issues;
  auto records = parse_corpus_records(read_file(o.corpus), issues, false);
  for (const auto& issue : issues)
    err << "rejected poem " << issue.poem_index << " (file line " << issue.source_line << "): " << issue.message << '\n';
  std::vector<Poem> poems;
  for (const auto& r : records) poems.push_back(to_poem(r, base.vocab));

  auto result = finetune_style(base.model, base.tfidf, poems, rc.train);
  KeyValues echo = base.config;
  for (const auto& [k, v] : rc.train.to_map()) echo["finetune." + k] = v;
  for (const auto& [k, v] : result.model.config().to_map()) echo[k] = v;
  save_checkpoint(o.out, Checkpoint{std::move(result.model), base.vocab, base.tfidf, echo});
  write_curve(o, result.curve);
  out << "fine-tuned on " << poems.size() << " poems, " << result.curve.size() << " steps\ncheckpoint written to "
      << o.out << '\n';
  return kOk;
}

json form_json(const std::optional<FormReport>& rep, const PatternTable& patterns, Form form) {
  if (!rep) return nullptr;
  json j{{"length_ok", rep->length_ok},
         {"tone_ok", rep->tone_ok},
         {"rhyme_ok", rep->rhyme_ok},
         {"first_line_rhymes", rep->first_line_rhymes},
         {"template", nullptr}};
  if (rep->template_index) j["template"] = patterns.templates(form)[*rep->template_index].name;
  return j;
}

json poem_record(const GeneratedPoem& g, const Vocabulary& vocab, const ModelConfig& mc, const Options& o,
                 bool constraints, const PatternTable& patterns) {
  json lines = json::array();
  for (const auto& l : g.poem.lines) lines.push_back(vocab.decode_utf8(l));
  json report = json::array();
  for (const auto& s : g.saliency) {
    std::vector<TokenId> chars;
    for (auto i : s.selection.indices) chars.push_back(g.poem.lines[s.source_line][i]);
    report.push_back({{"line", s.line + 1},
                      {"source_line", s.source_line + 1},
                      {"scores", s.scores},
                      {"selected", s.selection.indices},
                      {"selected_scores", s.selection.scores},
                      {"selected_chars", vocab.decode_utf8(chars)}});
  }
  return json{{"keyword", vocab.decode_utf8(g.keyword)},
              {"form", form_name(g.poem.form)},
              {"style", style_name(g.poem.style.value_or(Style::kNone))},
              {"clue", clue_mode_name(mc.clue)},
              {"ext", extension_name(mc.extension)},
              {"lines", lines},
              {"log_prob", g.log_prob},
              {"line_log_probs", g.line_log_probs},
              {"saliency", report},
              {"form_check", form_json(g.form_check, patterns, g.poem.form)},
              {"constraints", constraints ? "in-search" : "off"},
              {"template", g.template_name.empty() ? json(nullptr) : json(g.template_name)},
              {"beam", o.beam},
              {"seed", o.seed.value_or(0)}};
}

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  auto ck = load_checkpoint(o.checkpoint);
  const auto& mc = ck.model.config();
  if (!o.clue.empty() && parse_clue_mode(o.clue) != mc.clue)
    throw ValidationError("--clue " + o.clue + " does not match the checkpoint (" +
                          std::string(clue_mode_name(mc.clue)) + ")");
  if (!o.ext.empty() && !(parse_extension(o.ext) == mc.extension))
    throw ValidationError("--ext " + o.ext + " does not match the checkpoint (" + extension_name(mc.extension) + ")");
  if (o.beam == 0) throw ValidationError("--beam must be >= 1");

  const bool constraints = o.constraints.empty() ? !o.lexicon.empty() : o.constraints == "on";
  if (constraints && o.lexicon.empty()) throw ValidationError("--constraints on needs --lexicon");
  std::optional<ToneLexicon> lexicon;
  if (!o.lexicon.empty()) {
    auto load = load_tone_lexicon(o.lexicon);
    if (load.duplicates) err << "lexicon: " << load.duplicates << " duplicate entries (last one kept)\n";
    lexicon = std::move(load.lexicon);
  }
  const auto patterns = PatternTable::standard();

  GenerateOptions go;
  go.form = parse_form(o.form);
  go.beam = o.beam;
  go.constraints = constraints;
  if (!o.style.empty()) go.style = parse_style(o.style);
  go.seed = o.seed.value_or(0);
  go.tf_scope = checkpoint_scope(ck);

  std::vector<std::vector<TokenId>> keywords;
  for (const auto& k : o.keywords) {
    const auto text = utf8::decode(k);
    if (text.empty()) throw ValidationError("empty --keyword");
    for (char32_t c : text)
      if (!ck.vocab.find(c)) err << "keyword character " << utf8::encode(c) << " is not in the vocabulary; using UNK\n";
    keywords.push_back(ck.vocab.encode(text));
  }

  GenerationContext ctx{ck.model, ck.vocab, ck.tfidf, lexicon ? &*lexicon : nullptr, &patterns};
  std::vector<std::string> records(keywords.size());
  std::vector<std::exception_ptr> errors(keywords.size());
  auto session = [&](std::size_t i) {
    try {
      auto g = generate_poem(ctx, keywords[i], go);
      records[i] = poem_record(g, ck.vocab, mc, o, constraints, patterns).dump();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(o.jobs.value_or(1), keywords.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < keywords.size(); ++i) session(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < keywords.size(); i += workers) session(i);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::string text;
  for (const auto& r : records) text += r + '\n';
  if (o.out.empty())
    out << text;
  else
    write_text(o.out, text);
  return kOk;
}

std::vector<std::u32string> flatten(const std::vector<std::array<std::u32string, kLinesPerPoem>>& poems) {
  std::vector<std::u32string> out;
  for (const auto& p : poems) out.insert(out.end(), p.begin(), p.end());
  return out;
}

int cmd_eval_bleu(const Options& o, std::ostream& out, std::ostream&) {
  const auto hyp = read_poems(o.generated);
  const auto ref = read_poems(o.references);
  if (hyp.size() != ref.size())
    throw ValidationError(std::to_string(hyp.size()) + " generated poems but " + std::to_string(ref.size()) +
                          " references");
  if (hyp.empty()) throw ValidationError("no poems to score");
  const auto rep = corpus_bleu(flatten(hyp), flatten(ref));
  out << "BLEU\t" << fixed(rep.bleu, 2) << '\n';
  for (std::size_t n = 0; n < kBleuOrder; ++n)
    out << "P" << n + 1 << "\t" << fixed(rep.precisions[n], 6) << "\t(" << rep.matches[n] << "/" << rep.totals[n]
        << ")\n";
  out << "BP\t" << fixed(rep.brevity_penalty, 6) << "\nhyp_len\t" << rep.hypothesis_length << "\nref_len\t"
      << rep.reference_length << '\n';
  if (!o.out.empty()) {
    json j{{"bleu", rep.bleu},
           {"precisions", rep.precisions},
           {"matches", rep.matches},
           {"totals", rep.totals},
           {"brevity_penalty", rep.brevity_penalty},
           {"hypothesis_length", rep.hypothesis_length},
           {"reference_length", rep.reference_length},
           {"poems", hyp.size()}};
    write_text(o.out, j.dump(2) + '\n');
  }
  return kOk;
}

std::vector<std::vector<std::size_t>> parse_gold(const std::string& cell) {
  std::vector<std::vector<std::size_t>> out(1);
  std::string num;
  auto flush = [&] {
    if (!num.empty()) out.back().push_back(std::stoul(num));
    num.clear();
  };
  for (char c : cell) {
    if (c == ';') {
      flush();
      out.emplace_back();
    } else if (c == ',') {
      flush();
    } else if (c >= '0' && c <= '9') {
      num += c;
    } else if (c != ' ') {
      throw ValidationError("bad annotation cell: " + cell);
    }
  }
  flush();
  return out;
}

int cmd_eval_saliency(const Options& o, std::ostream& out, std::ostream&) {
  auto ck = load_checkpoint(o.checkpoint);
  std::vector<std::vector<std::size_t>> model_sel, gold_sel;
  std::size_t poems = 0;
  for (const auto& line : content_lines(read_file(o.annotations))) {
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw ValidationError("annotation line lacks a gold column: " + line);
    auto gold = parse_gold(line.substr(tab + 1));
    if (gold.size() != kLinesPerPoem - 1)
      throw ValidationError("annotation needs 3 ';'-separated index sets: " + line);
    auto poem = encode_checked(parse_poem_text(line.substr(0, tab)), ck.vocab);
    auto tables = inspect_saliency(ck, poem);
    for (std::size_t k = 0; k < tables.size(); ++k) {
      model_sel.push_back(tables[k].selection.indices);
      gold_sel.push_back(gold[k]);
    }
    ++poems;
  }
  if (model_sel.empty()) throw ValidationError("no annotations in " + o.annotations);
  const double score = saliency_jaccard(model_sel, gold_sel);
  out << "poems\t" << poems << "\nlines\t" << model_sel.size() << "\njaccard\t" << fixed(score, 6) << '\n';
  if (!o.out.empty())
    write_text(o.out, json{{"poems", poems}, {"lines", model_sel.size()}, {"jaccard", score}}.dump(2) + '\n');
  return kOk;
}

int cmd_eval_innovation(const Options& o, std::ostream& out, std::ostream&) {
  const auto poems = read_poems(o.generated);
  if (poems.size() < 2) throw ValidationError("innovation needs at least 2 poems");
  std::vector<std::u32string> whole;
  for (const auto& p : poems) whole.push_back(p[0] + p[1] + p[2] + p[3]);
  const double score = innovation(whole);
  out << "poems\t" << poems.size() << "\ninnovation\t" << fixed(score, 6) << '\n';
  if (!o.out.empty()) write_text(o.out, json{{"poems", poems.size()}, {"innovation", score}}.dump(2) + '\n');
  return kOk;
}

int cmd_inspect(const Options& o, std::ostream& out, std::ostream&) {
  auto ck = load_checkpoint(o.checkpoint);
  auto raw = poem_argument(o.poem);
  if (!o.keywords.empty()) raw.keyword = utf8::decode(o.keywords.front());
  const auto form = form_for_length(raw.lines[0].size());
  if (!o.form.empty() && form && parse_form(o.form) != *form)
    throw ValidationError("poem is " + std::string(form_name(*form)) + " but --form " + o.form + " was given");
  auto poem = encode_checked(raw, ck.vocab);
  print_transition_tables(out, ck.vocab, inspect_saliency(ck, poem));
  return kOk;
}

int cmd_check_form(const Options& o, std::ostream& out, std::ostream& err) {
  auto load = load_tone_lexicon(o.lexicon);
  if (load.duplicates) err << "lexicon: " << load.duplicates << " duplicate entries (last one kept)\n";
  std::vector<std::array<std::u32string, kLinesPerPoem>> poems;
  if (!o.poem.empty()) poems.push_back(poem_argument(o.poem).lines);
  if (!o.generated.empty()) {
    auto more = read_poems(o.generated);
    poems.insert(poems.end(), more.begin(), more.end());
  }
  if (poems.empty()) throw ValidationError("check-form needs --poem or --generated");

  // Characters are looked up directly, so a throwaway vocabulary over the poems suffices.
  std::vector<char32_t> chars;
  for (const auto& p : poems)
    for (const auto& l : p) chars.insert(chars.end(), l.begin(), l.end());
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  Vocabulary vocab(chars);
  const auto tones = load.lexicon.by_token(vocab);
  const auto patterns = PatternTable::standard();

  json all = json::array();
  for (std::size_t i = 0; i < poems.size(); ++i) {
    std::array<std::vector<TokenId>, kLinesPerPoem> ids;
    for (std::size_t l = 0; l < kLinesPerPoem; ++l) ids[l] = vocab.encode(poems[i][l]);
    const auto form = form_for_length(ids[0].size()).value_or(Form::kWujue);
    const auto rep = check_form(ids, form, tones, patterns);
    out << "poem " << i + 1 << "\tlength " << (rep.length_ok ? "ok" : "FAIL") << "\ttone "
        << (rep.tone_ok ? "ok" : "FAIL") << "\trhyme " << (rep.rhyme_ok ? "ok" : "FAIL");
    if (rep.template_index) out << "\ttemplate " << patterns.templates(form)[*rep.template_index].name;
    out << '\n';
    all.push_back(form_json(rep, patterns, form));
  }
  if (!o.out.empty()) write_text(o.out, all.dump(2) + '\n');
  return kOk;
}

}  // namespace

std::vector<TransitionTable> inspect_saliency(const Checkpoint& ck, const Poem& poem) {
  Graph graph(ck.model);
  ChainOptions opts{&ck.tfidf, checkpoint_scope(ck), false, std::nullopt};
  auto chain = build_chain(graph, poem, opts);
  std::vector<TransitionTable> out;
  for (std::size_t k = 0; k < chain.tasks.size(); ++k) {
    const auto& trace = chain.traces[k];
    if (!trace.scores || !trace.selection) continue;
    TransitionTable t;
    t.target_line = chain.tasks[k].target_line;
    t.source_line = t.target_line - 1;
    t.source = chain.tasks[k].source;
    t.scores = trace.scores->r;
    t.selection = *trace.selection;
    out.push_back(std::move(t));
  }
  return out;
}

void print_transition_tables(std::ostream& out, const Vocabulary& vocab, std::span<const TransitionTable> tables) {
  for (const auto& t : tables) {
    out << "# line " << t.source_line + 1 << " -> " << t.target_line + 1 << "\tsource " << vocab.decode_utf8(t.source)
        << '\n';
    out << "index\tchar\tscore\tselected\n";
    for (std::size_t i = 0; i < t.scores.size(); ++i) {
      const bool sel = std::find(t.selection.indices.begin(), t.selection.indices.end(), i) !=
                       t.selection.indices.end();
      out << i << '\t' << vocab.text(t.source[i]) << '\t' << fixed(t.scores[i], 9) << '\t' << (sel ? "*" : "")
          << '\n';
    }
    out << "selected\t" << join_indices(t.selection.indices) << '\n';
  }
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Salient-clue quatrain generation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");
  Options o;

  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Random seed"); };
  auto add_jobs = [&](CLI::App* c) { c->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber); };

  auto* train = app.add_subcommand("train", "Train a model on a corpus");
  train->add_option("--corpus", o.corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  train->add_option("--config", o.config, "Key = value config file")->check(CLI::ExistingFile);
  train->add_option("--out", o.out, "Checkpoint to write")->required();
  train->add_option("--clue", o.clue, "Clue strategy")->check(CLI::IsMember(kClues));
  train->add_option("--ext", o.ext, "Extension vectors")->check(CLI::IsMember(kExts));
  train->add_option("--loss-csv", o.loss_csv, "Write the loss curve as CSV");
  add_seed(train);
  add_jobs(train);

  auto* finetune = app.add_subcommand("finetune-style", "Fine-tune a model with the style extension");
  finetune->add_option("--checkpoint", o.checkpoint, "Base checkpoint")->required()->check(CLI::ExistingFile);
  finetune->add_option("--corpus", o.corpus, "Style-labelled corpus")->required()->check(CLI::ExistingFile);
  finetune->add_option("--config", o.config, "Key = value config file")->check(CLI::ExistingFile);
  finetune->add_option("--out", o.out, "Checkpoint to write")->required();
  finetune->add_option("--loss-csv", o.loss_csv, "Write the loss curve as CSV");
  add_seed(finetune);
  add_jobs(finetune);

  auto* generate = app.add_subcommand("generate", "Generate quatrains from keywords");
  generate->add_option("--checkpoint", o.checkpoint, "Checkpoint")->required()->check(CLI::ExistingFile);
  generate->add_option("--keyword", o.keywords, "Keyword (repeatable)")->required();
  generate->add_option("--form", o.form, "Quatrain form")->check(CLI::IsMember(kForms));
  generate->add_option("--style", o.style, "Style label")->check(CLI::IsMember(kStyles));
  generate->add_option("--clue", o.clue, "Expected clue strategy")->check(CLI::IsMember(kClues));
  generate->add_option("--ext", o.ext, "Expected extension vectors")->check(CLI::IsMember(kExts));
  generate->add_option("--beam", o.beam, "Beam width");
  generate->add_option("--constraints", o.constraints, "Form constraints (default: on with --lexicon)")
      ->check(CLI::IsMember(kSwitch));
  generate->add_option("--lexicon", o.lexicon, "Tone lexicon TSV")->check(CLI::ExistingFile);
  generate->add_option("--out", o.out, "JSON-lines output file (default: stdout)");
  add_seed(generate);
  add_jobs(generate);

  auto* bleu = app.add_subcommand("eval-bleu", "Corpus BLEU of generated poems against references");
  bleu->add_option("--generated", o.generated, "Generated poems")->required()->check(CLI::ExistingFile);
  bleu->add_option("--references", o.references, "Reference poems")->required()->check(CLI::ExistingFile);
  bleu->add_option("--out", o.out, "JSON report file");

  auto* sal = app.add_subcommand("eval-saliency", "Jaccard of model selections against annotated ones");
  sal->add_option("--checkpoint", o.checkpoint, "Checkpoint")->required()->check(CLI::ExistingFile);
  sal->add_option("--annotations", o.annotations, "Annotated poems")->required()->check(CLI::ExistingFile);
  sal->add_option("--out", o.out, "JSON report file");

  auto* innov = app.add_subcommand("eval-innovation", "Mean pairwise Jaccard of generated poems");
  innov->add_option("--generated", o.generated, "Generated poems")->required()->check(CLI::ExistingFile);
  innov->add_option("--out", o.out, "JSON report file");

  auto* inspect = app.add_subcommand("inspect-saliency", "Per-line saliency scores and selections of a poem");
  inspect->add_option("--checkpoint", o.checkpoint, "Checkpoint")->required()->check(CLI::ExistingFile);
  inspect->add_option("--poem", o.poem, "Poem text l1|l2|l3|l4 or a file holding one")->required();
  inspect->add_option("--keyword", o.keywords, "Keyword (default: annotated or extracted)");
  auto* inspect_form = inspect->add_option("--form", o.form, "Expected form")->check(CLI::IsMember(kForms));

  auto* check = app.add_subcommand("check-form", "Check length, tone pattern and rhyme");
  check->add_option("--lexicon", o.lexicon, "Tone lexicon TSV")->required()->check(CLI::ExistingFile);
  check->add_option("--poem", o.poem, "Poem text or a file holding one");
  check->add_option("--generated", o.generated, "Generated poems")->check(CLI::ExistingFile);
  check->add_option("--out", o.out, "JSON report file");

  std::vector<std::string> argv_store{"salient"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kValidation;
  }

  try {
    if (*train) return cmd_train(o, out, err);
    if (*finetune) return cmd_finetune(o, out, err);
    if (*generate) return cmd_generate(o, out, err);
    if (*bleu) return cmd_eval_bleu(o, out, err);
    if (*sal) return cmd_eval_saliency(o, out, err);
    if (*innov) return cmd_eval_innovation(o, out, err);
    if (*inspect) {
      if (!*inspect_form) o.form.clear();
      return cmd_inspect(o, out, err);
    }
    if (*check) return cmd_check_form(o, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const CorpusError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kValidation;
}

}  // namespace salient::cli
