#pragma once

// Posterior draws on disk: a columnar binary file plus a JSON manifest.
//
// Binary layout (native little-endian):
//   "MMTDRW01"                          8-byte magic
//   u32 column_count
//   per column:
//     u32 name_length, name bytes
//     u8  dtype (0 = f64, 1 = i32)
//     u64 rows (= retained draws), u64 cols
//     rows * cols values, one draw per row

#include "mementum/posterior_sampler.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace mementum {

nlohmann::json prior_to_json(const PriorSpec& prior);
nlohmann::json settings_to_json(const McmcSettings& settings);

void write_draws_binary(const std::filesystem::path& path, const PosteriorDraws& draws);
PosteriorDraws read_draws_binary(const std::filesystem::path& path);

/// Manifest recording what produced the draws file.
nlohmann::json draws_manifest(const PosteriorDraws& draws, const std::string& draws_file, const std::string& input_hash,
                              const std::string& config_hash);

}  // namespace mementum
