#pragma once

#include <filesystem>
#include <iosfwd>

#include "vithsd/classifier/model.hpp"

namespace vithsd::classifier {

/// Binary model file, little-endian:
///   "VTHSDLM\0" | u32 version | u64 dim | u64 seed | u32 heads | u32 rows
///   | u64 epochs | u64 batch | f64 lr | f64 momentum | f64 l2
///   | u32 id length | id bytes | u64 curve length | f64 curve[]
///   | f64 bias[heads*rows] | f64 weights[dim*heads*rows]
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const MultiHeadLinearModel& model, std::ostream& out);
void save_model(const MultiHeadLinearModel& model, const std::filesystem::path& path);

/// Validates magic, version and head shapes. Throws IoError / SchemaError.
MultiHeadLinearModel load_model(std::istream& in);
MultiHeadLinearModel load_model(const std::filesystem::path& path);

}  // namespace vithsd::classifier
