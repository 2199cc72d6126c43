#include "salient/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "salient/utf8.hpp"

namespace salient {

std::size_t line_length(Form form) { return form == Form::kWujue ? 5 : 7; }

std::size_t max_salient(Form form) { return form == Form::kWujue ? 2 : 3; }

std::string_view form_name(Form form) { return form == Form::kWujue ? "wujue" : "qijue"; }

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// Validates line count and lengths; returns the issue on failure.
std::optional<CorpusIssue> validate(const RawPoem& p) {
  auto form = form_for_length(p.lines[0].size());
  if (!form)
    return CorpusIssue{0, 0, p.source_line,
                       "line 0 has " + std::to_string(p.lines[0].size()) + " characters; expected 5 or 7"};
  const auto t = line_length(*form);
  for (std::size_t i = 1; i < kLinesPerPoem; ++i)
    if (p.lines[i].size() != t)
      return CorpusIssue{0, i, p.source_line,
                         "line " + std::to_string(i) + " has " + std::to_string(p.lines[i].size()) +
                             " characters; " + std::string(form_name(*form)) + " requires " + std::to_string(t)};
  return std::nullopt;
}

std::optional<RawPoem> parse_record(std::string_view text, std::size_t source_line, std::string& error) {
  auto cols = split(text, '\t');
  auto parts = split(trim(cols[0]), '|');
  if (parts.size() != kLinesPerPoem) {
    error = "expected 4 lines separated by '|', found " + std::to_string(parts.size());
    return std::nullopt;
  }
  RawPoem p;
  p.source_line = source_line;
  try {
    for (std::size_t i = 0; i < kLinesPerPoem; ++i) p.lines[i] = utf8::decode(trim(parts[i]));
    if (cols.size() > 1 && !trim(cols[1]).empty()) p.style = parse_style(trim(cols[1]));
    if (cols.size() > 2) p.keyword = utf8::decode(trim(cols[2]));
  } catch (const std::invalid_argument& e) {
    error = e.what();
    return std::nullopt;
  }
  return p;
}

}  // namespace

Form parse_form(std::string_view name) {
  auto n = lower(name);
  if (n == "wujue") return Form::kWujue;
  if (n == "qijue") return Form::kQijue;
  throw std::invalid_argument("unknown form: " + std::string(name));
}

std::optional<Form> form_for_length(std::size_t length) {
  if (length == 5) return Form::kWujue;
  if (length == 7) return Form::kQijue;
  return std::nullopt;
}

std::string_view style_name(Style style) {
  switch (style) {
    case Style::kPastoral: return "pastoral";
    case Style::kBattlefield: return "battlefield";
    case Style::kRomantic: return "romantic";
    case Style::kNone: return "none";
  }
  return "none";
}

Style parse_style(std::string_view name) {
  auto n = lower(name);
  if (n == "pastoral") return Style::kPastoral;
  if (n == "battlefield") return Style::kBattlefield;
  if (n == "romantic") return Style::kRomantic;
  if (n == "none") return Style::kNone;
  throw std::invalid_argument("unknown style: " + std::string(name));
}

std::vector<RawPoem> parse_corpus_records(std::string_view text, std::vector<CorpusIssue>& rejected, bool strict) {
  std::vector<RawPoem> out;
  std::size_t source_line = 0;
  std::size_t poem_index = 0;
  for (auto line : split(text, '\n')) {
    ++source_line;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::string error;
    auto rec = parse_record(line, source_line, error);
    std::optional<CorpusIssue> issue;
    if (!rec) {
      issue = CorpusIssue{poem_index, std::nullopt, source_line, error};
    } else if (auto bad = validate(*rec)) {
      issue = *bad;
      issue->poem_index = poem_index;
    }
    if (issue) {
      if (strict)
        throw CorpusError("poem " + std::to_string(issue->poem_index) +
                          (issue->line_index ? " line " + std::to_string(*issue->line_index) : std::string()) +
                          " (file line " + std::to_string(source_line) + "): " + issue->message);
      rejected.push_back(std::move(*issue));
    } else {
      out.push_back(std::move(*rec));
    }
    ++poem_index;
  }
  return out;
}

Poem to_poem(const RawPoem& raw, const Vocabulary& vocab) {
  Poem p;
  p.form = *form_for_length(raw.lines[0].size());
  for (std::size_t i = 0; i < kLinesPerPoem; ++i) p.lines[i] = vocab.encode(raw.lines[i]);
  p.style = raw.style;
  p.keyword = vocab.encode(raw.keyword);
  return p;
}

Corpus parse_corpus(std::string_view text, const CorpusOptions& options) {
  Corpus corpus;
  auto records = parse_corpus_records(text, corpus.rejected, options.strict);
  if (records.empty()) throw CorpusError("corpus contains no valid poems");
  if (options.validation_count >= records.size())
    throw CorpusError("validation split (" + std::to_string(options.validation_count) +
                      ") leaves no training poems out of " + std::to_string(records.size()));
  const std::size_t n_train = records.size() - options.validation_count;

  std::unordered_map<char32_t, std::size_t> counts;
  for (std::size_t i = 0; i < n_train; ++i)
    for (const auto& line : records[i].lines)
      for (char32_t c : line) ++counts[c];
  corpus.vocab = Vocabulary::from_counts(counts);

  for (std::size_t i = 0; i < records.size(); ++i)
    (i < n_train ? corpus.train : corpus.validation).push_back(to_poem(records[i], corpus.vocab));
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const CorpusOptions& options) {
  return parse_corpus(read_file(path), options);
}

RawPoem parse_poem_text(std::string_view text) {
  std::vector<CorpusIssue> issues;
  auto recs = parse_corpus_records(text, issues, /*strict=*/true);
  if (recs.size() != 1) throw CorpusError("expected exactly one poem, found " + std::to_string(recs.size()));
  return recs.front();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace salient
