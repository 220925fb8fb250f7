#include "vad/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "vad/error.hpp"

namespace vad {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'V', 'A', 'D', 'T'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

template <typename U>
void put_le(std::vector<std::uint8_t>& out, U bits) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

template <typename U>
U get_le(const std::uint8_t* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

[[noreturn]] void fail(const std::filesystem::path& origin, const std::string& what) {
  throw ValidationError("tensor file '" + origin.string() + "': " + what);
}

TensorHeader parse_header(std::span<const std::uint8_t> bytes, const std::filesystem::path& origin) {
  if (bytes.size() < 8) fail(origin, "truncated header (" + std::to_string(bytes.size()) + " bytes)");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) fail(origin, "bad magic, expected \"VADT\"");
  const std::uint8_t code = bytes[4];
  if (code > 1) fail(origin, "unknown dtype code " + std::to_string(code));
  const std::size_t ndim = bytes[5];
  if (ndim == 0 || ndim > kMaxTensorDims) fail(origin, "invalid ndim " + std::to_string(ndim));
  const std::size_t header = tensor_header_size(ndim);
  if (bytes.size() < header) fail(origin, "truncated header (need " + std::to_string(header) + " bytes)");
  TensorHeader h;
  h.dtype = static_cast<DType>(code);
  for (std::size_t i = 0; i < ndim; ++i) h.shape.push_back(get_u32(bytes.data() + 8 + 4 * i));
  return h;
}

void check_payload(const TensorHeader& h, std::size_t payload_bytes, const std::filesystem::path& origin) {
  const std::size_t expected = dtype_size(h.dtype) * element_count(h.shape);
  if (payload_bytes != expected) {
    fail(origin, "payload is " + std::to_string(payload_bytes) + " bytes but header shape requires " +
                     std::to_string(expected));
  }
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open tensor file '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::size_t dtype_size(DType dtype) { return dtype == DType::Float64 ? 8 : 4; }

std::size_t tensor_header_size(std::size_t ndim) { return (8 + 4 * ndim + 15) / 16 * 16; }

std::size_t element_count(std::span<const std::uint32_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::uint32_t d) { return a * d; });
}

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor) {
  if (tensor.shape.empty() || tensor.shape.size() > kMaxTensorDims) {
    throw std::invalid_argument("encode_tensor: ndim must be in [1, 8]");
  }
  if (element_count(tensor.shape) != tensor.values.size()) {
    throw std::invalid_argument("encode_tensor: value count does not match shape");
  }
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.push_back(static_cast<std::uint8_t>(tensor.dtype));
  out.push_back(static_cast<std::uint8_t>(tensor.shape.size()));
  out.push_back(0);
  out.push_back(0);
  for (std::uint32_t d : tensor.shape) put_u32(out, d);
  out.resize(tensor_header_size(tensor.shape.size()), 0);
  out.reserve(out.size() + dtype_size(tensor.dtype) * tensor.values.size());
  for (double v : tensor.values) {
    if (tensor.dtype == DType::Float32) {
      put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    } else {
      put_le(out, std::bit_cast<std::uint64_t>(v));
    }
  }
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes, const std::filesystem::path& origin) {
  TensorHeader h = parse_header(bytes, origin);
  const std::size_t header = tensor_header_size(h.shape.size());
  check_payload(h, bytes.size() - header, origin);
  Tensor t;
  t.dtype = h.dtype;
  t.shape = std::move(h.shape);
  const std::size_t n = element_count(t.shape);
  t.values.resize(n);
  const std::uint8_t* p = bytes.data() + header;
  for (std::size_t i = 0; i < n; ++i) {
    if (t.dtype == DType::Float32) {
      t.values[i] = std::bit_cast<float>(get_le<std::uint32_t>(p + 4 * i));
    } else {
      t.values[i] = std::bit_cast<double>(get_le<std::uint64_t>(p + 8 * i));
    }
  }
  return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  const auto bytes = encode_tensor(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Tensor read_tensor(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  return decode_tensor(bytes, path);
}

TensorHeader read_tensor_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open tensor file '" + path.string() + "'");
  std::vector<std::uint8_t> head(tensor_header_size(kMaxTensorDims));
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  TensorHeader h = parse_header(head, path);
  const std::size_t total = std::filesystem::file_size(path);
  check_payload(h, total - tensor_header_size(h.shape.size()), path);
  return h;
}

}  // namespace vad
