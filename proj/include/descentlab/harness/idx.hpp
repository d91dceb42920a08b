#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace descentlab::harness {

/// Unsigned-byte IDX tensor (the MNIST container format).
struct IdxTensor {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;  ///< row-major, last dimension fastest

  [[nodiscard]] std::size_t element_count() const;
  friend bool operator==(const IdxTensor&, const IdxTensor&) = default;
};

/// Header: bytes 00 00 08 <ndim>, then ndim big-endian uint32 sizes, then the
/// payload. Throws FormatError for any other type code, a truncated header,
/// or a payload whose length differs from the product of the sizes.
IdxTensor parse_idx(std::span<const std::uint8_t> bytes);
IdxTensor load_idx(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_idx(const IdxTensor& tensor);
void write_idx(const std::filesystem::path& path, const IdxTensor& tensor);

}  // namespace descentlab::harness
