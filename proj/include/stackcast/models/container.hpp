#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stackcast/models/fitted.hpp"

namespace stackcast::models {

inline constexpr std::uint32_t kContainerVersion = 1;

// A fitted model and its manifest (family, spec, seed, training-window hash
// and whatever else the caller records), stored as a JSON string.
struct ModelRecord {
    std::string manifest_json;
    FittedModel model;
};

// "SCMD" magic, version, record count, then per record the manifest and the
// model in native-endian binary. Doubles are stored bit for bit.
std::string encode_models(const std::vector<ModelRecord>& records);
std::vector<ModelRecord> decode_models(std::string_view bytes);

void write_models(const std::filesystem::path& path, const std::vector<ModelRecord>& records);
std::vector<ModelRecord> read_models(const std::filesystem::path& path);

}  // namespace stackcast::models
