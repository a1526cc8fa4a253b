#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "cadence/autoencoder.hpp"

namespace cadence {

inline constexpr std::uint16_t kModelFormatVersion = 1;

/// Model file layout (all integers little-endian):
///
///   "CADM"            4 bytes magic
///   version           u16
///   header_length     u32
///   header            JSON: dims, layer shapes, kernel family, frozen_gamma,
///                     meta, checksum algorithm
///   parameters        binary64 blocks, per layer in order
///                     (encoder then decoder): weight row-major, then bias
///   crc32             u32 over every preceding byte
std::string serialize_model(const AutoencoderModel& model);
AutoencoderModel deserialize_model(std::string_view bytes);

void save_model(const AutoencoderModel& model, const std::filesystem::path& path);
AutoencoderModel load_model(const std::filesystem::path& path);

}  // namespace cadence
