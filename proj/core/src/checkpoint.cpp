#include "salient/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "salient/corpus.hpp"

namespace salient {

namespace {

constexpr char kMagic[8] = {'S', 'A', 'L', 'C', 'K', 'P', 'T', '\0'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

void put_u64(std::string& out, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

std::uint64_t get_u64(std::string_view in, std::size_t at) {
  std::uint64_t v;
  std::memcpy(&v, in.data() + at, 8);
  return v;
}

std::size_t padded(std::size_t n) { return (n + 7) / 8 * 8; }

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  using nlohmann::json;
  const auto& params = ck.model.params();
  json manifest;
  manifest["format"] = "salient-clue-checkpoint";
  manifest["version"] = kCheckpointVersion;
  manifest["config"] = ck.config;
  manifest["model"] = ck.model.config().to_map();
  manifest["vocabulary"] = ck.vocab.serialize();
  manifest["tfidf"] = {{"documents", ck.tfidf.document_count()},
                       {"df", ck.tfidf.df_counts()},
                       {"unknown_idf_bits", std::bit_cast<std::uint64_t>(ck.tfidf.unknown_idf())}};
  json entries = json::array();
  std::size_t offset = 0;
  for (std::size_t s = 0; s < params.size(); ++s) {
    const auto& t = params[s];
    entries.push_back({{"name", params.name(s)}, {"shape", t.shape()}, {"offset", offset}, {"count", t.size()}});
    offset += t.size() * sizeof(double);
  }
  manifest["parameters"] = std::move(entries);
  manifest["data_bytes"] = offset;

  const std::string text = manifest.dump();
  std::string out(kMagic, sizeof kMagic);
  put_u64(out, text.size());
  out += text;
  out.append(padded(out.size()) - out.size(), '\0');
  out.reserve(out.size() + offset);
  for (std::size_t s = 0; s < params.size(); ++s) {
    auto d = params[s].data();
    out.append(reinterpret_cast<const char*>(d.data()), d.size() * sizeof(double));
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  using nlohmann::json;
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw CheckpointError("not a checkpoint file (bad magic)");
  const auto mlen = get_u64(bytes, 8);
  if (16 + mlen > bytes.size()) throw CheckpointError("truncated checkpoint manifest");
  json manifest;
  try {
    manifest = json::parse(bytes.substr(16, mlen));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint manifest: ") + e.what());
  }
  try {
    if (manifest.at("version").get<int>() != kCheckpointVersion)
      throw CheckpointError("unsupported checkpoint version " + manifest.at("version").dump());
    const std::size_t data_start = padded(16 + mlen);
    const auto data_bytes = manifest.at("data_bytes").get<std::size_t>();
    if (data_start + data_bytes != bytes.size()) throw CheckpointError("checkpoint data section has the wrong size");

    ModelConfig mc;
    mc.apply(manifest.at("model").get<std::map<std::string, std::string>>());
    ParameterSet params;
    for (const auto& e : manifest.at("parameters")) {
      auto shape = e.at("shape").get<Shape>();
      const auto offset = e.at("offset").get<std::size_t>();
      const auto count = e.at("count").get<std::size_t>();
      if (count != shape_size(shape) || offset + count * sizeof(double) > data_bytes)
        throw CheckpointError("parameter " + e.at("name").get<std::string>() + " has an inconsistent extent");
      std::vector<double> values(count);
      std::memcpy(values.data(), bytes.data() + data_start + offset, count * sizeof(double));
      params.add(e.at("name").get<std::string>(), Tensor(std::move(shape), std::move(values)));
    }
    const auto& tf = manifest.at("tfidf");
    auto tfidf = TfIdfTable::from_counts(tf.at("documents").get<std::size_t>(),
                                         tf.at("df").get<std::vector<std::uint32_t>>(),
                                         std::bit_cast<double>(tf.at("unknown_idf_bits").get<std::uint64_t>()));
    return Checkpoint{Model(mc, std::move(params)), Vocabulary::deserialize(manifest.at("vocabulary").get<std::string>()),
                      std::move(tfidf), manifest.at("config").get<KeyValues>()};
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint does not describe a valid model: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const auto bytes = serialize_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const std::runtime_error& e) {
    throw CheckpointError(e.what());
  }
  return deserialize_checkpoint(bytes);
}

}  // namespace salient
