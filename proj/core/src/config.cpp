#include "salient/config.hpp"

#include <cstdio>
#include <stdexcept>

#include "salient/corpus.hpp"

namespace salient {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  std::uint64_t n = 0;
  try {
    n = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (v.empty() || pos != v.size() || v.front() == '-')
    throw std::invalid_argument("config key " + key + ": expected a non-negative integer, got '" + v + "'");
  return n;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (v.empty() || pos != v.size()) throw std::invalid_argument("config key " + key + ": expected a number, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw std::invalid_argument("config key " + key + ": expected a boolean, got '" + v + "'");
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    auto key = std::string(trim(line.substr(0, eq)));
    auto value = std::string(trim(line.substr(eq + 1)));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) { return parse_key_values(read_file(path)); }

std::string_view tf_scope_name(TfScope scope) { return scope == TfScope::kLine ? "line" : "poem"; }

TfScope parse_tf_scope(std::string_view name) {
  if (name == "line") return TfScope::kLine;
  if (name == "poem") return TfScope::kPoem;
  throw std::invalid_argument("unknown tf scope: " + std::string(name));
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw std::invalid_argument("train config: batch_size must be >= 1");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("train config: learning_rate must be >= 0");
  if (jobs == 0) throw std::invalid_argument("train config: jobs must be >= 1");
  if (!teacher_forcing) throw std::invalid_argument("train config: only teacher-forced training is supported");
}

KeyValues TrainConfig::to_map() const {
  return {
      {"batch_size", std::to_string(batch_size)},
      {"learning_rate", fmt(learning_rate)},
      {"beta1", fmt(beta1)},
      {"beta2", fmt(beta2)},
      {"epsilon", fmt(epsilon)},
      {"epochs", std::to_string(epochs)},
      {"max_steps", std::to_string(max_steps)},
      {"seed", std::to_string(seed)},
      {"teacher_forcing", teacher_forcing ? "true" : "false"},
      {"detach_clue", detach_clue ? "true" : "false"},
      {"validation_interval", std::to_string(validation_interval)},
      {"validation_count", std::to_string(validation_count)},
      {"jobs", std::to_string(jobs)},
      {"tf_scope", std::string(tf_scope_name(tf_scope))},
  };
}

void TrainConfig::apply(const KeyValues& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "batch_size") batch_size = to_u64(k, v);
    else if (k == "learning_rate") learning_rate = to_double(k, v);
    else if (k == "beta1") beta1 = to_double(k, v);
    else if (k == "beta2") beta2 = to_double(k, v);
    else if (k == "epsilon") epsilon = to_double(k, v);
    else if (k == "epochs") epochs = to_u64(k, v);
    else if (k == "max_steps") max_steps = to_u64(k, v);
    else if (k == "seed") seed = to_u64(k, v);
    else if (k == "teacher_forcing") teacher_forcing = to_bool(k, v);
    else if (k == "detach_clue") detach_clue = to_bool(k, v);
    else if (k == "validation_interval") validation_interval = to_u64(k, v);
    else if (k == "validation_count") validation_count = to_u64(k, v);
    else if (k == "jobs") jobs = to_u64(k, v);
    else if (k == "tf_scope") tf_scope = parse_tf_scope(v);
  }
}

RunConfig RunConfig::from(const KeyValues& kv) {
  RunConfig rc;
  const auto model_keys = rc.model.to_map();
  const auto train_keys = rc.train.to_map();
  for (const auto& [k, v] : kv)
    if (!model_keys.count(k) && !train_keys.count(k)) throw std::invalid_argument("unknown config key: " + k);
  rc.model.apply(kv);
  rc.train.apply(kv);
  rc.train.validate();
  return rc;
}

KeyValues RunConfig::echo() const {
  KeyValues kv = model.to_map();
  for (auto& [k, v] : train.to_map()) kv[k] = v;
  return kv;
}

}  // namespace salient
