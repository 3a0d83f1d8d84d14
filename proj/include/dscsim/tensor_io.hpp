#pragma once

#include <dscsim/core_types.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace dscsim {

// QTSR layout, little-endian:
//   "QTSR" | version:u8 = 1 | height:u32 | width:u32 | channels:u32 |
//   zero_point:i8 | scale:f32 | height*width*channels raw i8
inline constexpr char kQtsrMagic[4] = {'Q', 'T', 'S', 'R'};
inline constexpr std::uint8_t kQtsrVersion = 1;
inline constexpr std::size_t kQtsrHeaderBytes = 4 + 1 + 12 + 1 + 4;

void write_tensor(const QuantTensor& t, std::ostream& sink);

/// Throws BadMagic, VersionMismatch or TruncatedStream.
QuantTensor read_tensor(std::istream& source);

/// File wrappers; open/write failures throw IoError.
void save_tensor(const QuantTensor& t, const std::filesystem::path& path);
QuantTensor load_tensor(const std::filesystem::path& path);

}  // namespace dscsim
