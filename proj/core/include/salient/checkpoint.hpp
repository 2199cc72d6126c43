#pragma once

// Checkpoint file layout (all integers little-endian):
//
//   bytes 0..7    magic "SALCKPT\0"
//   bytes 8..15   u64 manifest length M
//   bytes 16..    M bytes of JSON manifest, then zero padding to a multiple of 8
//   data section  raw fp64 arrays, one per parameter, at manifest offsets
//
// The manifest carries the format version, every config key, the model
// configuration, the vocabulary, tf-idf document frequencies, and for each
// parameter its name, shape, byte offset (relative to the data section) and
// element count. Saving is deterministic, so equal models give equal bytes.

#include <filesystem>
#include <string>
#include <string_view>

#include "salient/config.hpp"
#include "salient/model.hpp"
#include "salient/tfidf.hpp"
#include "salient/vocabulary.hpp"

namespace salient {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  Vocabulary vocab;
  TfIdfTable tfidf;
  KeyValues config;  // echo of every config key used to produce the model
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace salient
