#include "descentlab/harness/idx.hpp"

#include "descentlab/types.hpp"

#include <fstream>
#include <iterator>
#include <string>

namespace descentlab::harness {
namespace {

constexpr std::uint8_t kUnsignedByte = 0x08;
constexpr std::size_t kMaxDims = 4;

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

std::size_t IdxTensor::element_count() const {
  std::size_t n = 1;
  for (std::uint32_t d : dims) {
    n *= d;
  }
  return n;
}

IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) {
    throw FormatError("idx: file shorter than the magic number");
  }
  const std::size_t ndim = bytes[3];
  if (bytes[0] != 0 || bytes[1] != 0 || bytes[2] != kUnsignedByte || ndim == 0 ||
      ndim > kMaxDims) {
    throw FormatError("idx: unsupported magic number 0x" + [&] {
      static const char* hex = "0123456789abcdef";
      std::string s;
      for (std::size_t i = 0; i < 4; ++i) {
        s += hex[bytes[i] >> 4];
        s += hex[bytes[i] & 0xf];
      }
      return s;
    }());
  }
  const std::size_t header = 4 + 4 * ndim;
  if (bytes.size() < header) {
    throw FormatError("idx: truncated dimension header");
  }
  IdxTensor out;
  for (std::size_t i = 0; i < ndim; ++i) {
    out.dims.push_back(read_be32(bytes, 4 + 4 * i));
  }
  const std::size_t expected = out.element_count();
  const std::size_t payload = bytes.size() - header;
  if (payload != expected) {
    throw FormatError("idx: payload has " + std::to_string(payload) + " bytes, header declares " +
                      std::to_string(expected));
  }
  out.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return out;
}

IdxTensor load_idx(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw FormatError("idx: cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return parse_idx(bytes);
}

std::vector<std::uint8_t> encode_idx(const IdxTensor& tensor) {
  if (tensor.dims.empty() || tensor.dims.size() > kMaxDims) {
    throw FormatError("idx: tensors must have 1 to 4 dimensions");
  }
  if (tensor.data.size() != tensor.element_count()) {
    throw FormatError("idx: data length does not match dimensions");
  }
  std::vector<std::uint8_t> out = {0, 0, kUnsignedByte, static_cast<std::uint8_t>(tensor.dims.size())};
  for (std::uint32_t d : tensor.dims) {
    append_be32(out, d);
  }
  out.insert(out.end(), tensor.data.begin(), tensor.data.end());
  return out;
}

void write_idx(const std::filesystem::path& path, const IdxTensor& tensor) {
  const std::vector<std::uint8_t> bytes = encode_idx(tensor);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) {
    throw FormatError("idx: failed writing " + path.string());
  }
}

}  // namespace descentlab::harness
