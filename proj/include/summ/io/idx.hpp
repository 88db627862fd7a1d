#pragma once

// IDX containers as used by MNIST: big-endian header, unsigned byte payload.
//   images: 0x00000803, n, rows, cols, then n*rows*cols bytes
//   labels: 0x00000801, n, then n bytes
// gzip-compressed files are detected by their 0x1f 0x8b signature.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "summ/io/dataset.hpp"

namespace summ {

class IdxFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class IdxKind { images, labels };

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxContent {
  IdxKind kind = IdxKind::images;
  std::uint32_t count = 0;
  std::uint32_t rows = 0;  ///< images only
  std::uint32_t cols = 0;  ///< images only
  std::vector<std::uint8_t> payload;
};

namespace detail {

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

inline void write_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  b.push_back(static_cast<std::uint8_t>(v >> 24));
  b.push_back(static_cast<std::uint8_t>(v >> 16));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
  b.push_back(static_cast<std::uint8_t>(v));
}

inline std::string hex32(std::uint32_t v) {
  std::ostringstream s;
  s << "0x" << std::hex << std::setw(8) << std::setfill('0') << v;
  return s.str();
}

inline std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in, const std::string& origin) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw IdxFormatError("zlib init failed for " + origin);
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> chunk(1 << 16);
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk.data();
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw IdxFormatError("corrupt gzip stream in " + origin);
    }
    out.insert(out.end(), chunk.begin(), chunk.begin() + static_cast<std::ptrdiff_t>(chunk.size() - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw IdxFormatError("truncated gzip stream in " + origin);
    }
  }
  inflateEnd(&zs);
  return out;
}

}  // namespace detail

/// Parses an in-memory IDX buffer (already decompressed).
inline IdxContent parse_idx(const std::vector<std::uint8_t>& bytes, IdxKind expected,
                            const std::string& origin = "<memory>") {
  if (bytes.size() < 4) {
    throw IdxFormatError("truncated IDX header in " + origin + ": " + std::to_string(bytes.size()) +
                         " bytes, magic number at offset 0 needs 4");
  }
  const std::uint32_t magic = detail::read_be32(bytes, 0);
  const std::uint32_t want = expected == IdxKind::images ? kIdxImagesMagic : kIdxLabelsMagic;
  if (magic != want) {
    std::string msg = "bad magic number " + detail::hex32(magic) + " at offset 0 in " + origin +
                      " (expected " + detail::hex32(want) + ")";
    if (magic == kIdxImagesMagic || magic == kIdxLabelsMagic) {
      msg += expected == IdxKind::images ? "; file holds labels, not images" : "; file holds images, not labels";
    }
    throw IdxFormatError(msg);
  }
  IdxContent c;
  c.kind = expected;
  const std::size_t header = expected == IdxKind::images ? 16 : 8;
  if (bytes.size() < header) {
    throw IdxFormatError("truncated IDX header in " + origin + ": need " + std::to_string(header) +
                         " bytes, found " + std::to_string(bytes.size()));
  }
  c.count = detail::read_be32(bytes, 4);
  std::uint64_t item = 1;
  if (expected == IdxKind::images) {
    c.rows = detail::read_be32(bytes, 8);
    c.cols = detail::read_be32(bytes, 12);
    item = std::uint64_t{c.rows} * c.cols;
  }
  const std::uint64_t need = std::uint64_t{c.count} * item;
  const std::uint64_t have = bytes.size() - header;
  if (have < need) {
    throw IdxFormatError("truncated IDX payload in " + origin + ": expected " + std::to_string(need) +
                         " bytes at offset " + std::to_string(header) + ", found " + std::to_string(have));
  }
  if (have > need) {
    throw IdxFormatError("trailing bytes in " + origin + ": payload at offset " + std::to_string(header) +
                         " should be " + std::to_string(need) + " bytes, found " + std::to_string(have));
  }
  c.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return c;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline IdxContent load_idx(const std::string& path, IdxKind expected) {
  auto bytes = read_file_bytes(path);
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) bytes = detail::gunzip(bytes, path);
  return parse_idx(bytes, expected, path);
}

inline std::vector<std::uint8_t> encode_idx(const IdxContent& c) {
  std::vector<std::uint8_t> out;
  const bool images = c.kind == IdxKind::images;
  detail::write_be32(out, images ? kIdxImagesMagic : kIdxLabelsMagic);
  detail::write_be32(out, c.count);
  if (images) {
    detail::write_be32(out, c.rows);
    detail::write_be32(out, c.cols);
  }
  out.insert(out.end(), c.payload.begin(), c.payload.end());
  return out;
}

inline void write_idx(const IdxContent& c, const std::string& path) {
  const auto bytes = encode_idx(c);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

/// Pixels scaled by 1/255; no mean subtraction.
inline RowMatrix images_to_matrix(const IdxContent& c) {
  if (c.kind != IdxKind::images) throw IdxFormatError("expected image content");
  const Index d = static_cast<Index>(c.rows) * c.cols;
  RowMatrix m(static_cast<Index>(c.count), d);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(c.payload[static_cast<std::size_t>(i)]) / 255.0;
  return m;
}

inline std::vector<int> labels_to_vector(const IdxContent& c) {
  if (c.kind != IdxKind::labels) throw IdxFormatError("expected label content");
  return std::vector<int>(c.payload.begin(), c.payload.end());
}

inline Dataset load_mnist(const std::string& images_path, const std::string& labels_path) {
  const auto images = load_idx(images_path, IdxKind::images);
  const auto labels = load_idx(labels_path, IdxKind::labels);
  if (images.count != labels.count) {
    throw IdxFormatError("image count " + std::to_string(images.count) + " in '" + images_path +
                         "' does not match label count " + std::to_string(labels.count) + " in '" +
                         labels_path + "'");
  }
  Dataset d;
  d.inputs = images_to_matrix(images);
  d.labels = labels_to_vector(labels);
  d.classes = 10;
  d.validate();
  return d;
}

}  // namespace summ
