#pragma once

// Binary tensor container shared by datasets and model artifacts.
//
// Layout (all integers little-endian):
//   bytes 0..3   magic "VADT"
//   byte  4      dtype code (0 = float32, 1 = float64)
//   byte  5      ndim (1..8)
//   bytes 6..7   reserved, zero
//   then ndim u32 dims, zero-padded so the header length is a multiple of 16
//   then the payload, row-major, little-endian
//
// The header is exactly 16 bytes for ndim <= 2 and 32 bytes for ndim in 3..6.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace vad {

enum class DType : std::uint8_t { Float32 = 0, Float64 = 1 };

inline constexpr std::size_t kMaxTensorDims = 8;

std::size_t dtype_size(DType dtype);
std::size_t tensor_header_size(std::size_t ndim);
std::size_t element_count(std::span<const std::uint32_t> shape);

struct TensorHeader {
  DType dtype = DType::Float32;
  std::vector<std::uint32_t> shape;
};

// Values are always held as double in memory; the on-disk dtype decides precision.
struct Tensor {
  DType dtype = DType::Float32;
  std::vector<std::uint32_t> shape;
  std::vector<double> values;
};

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor);
Tensor decode_tensor(std::span<const std::uint8_t> bytes, const std::filesystem::path& origin);

void write_tensor(const std::filesystem::path& path, const Tensor& tensor);

// Reads and fully validates a tensor file: magic, dtype, header, and that the
// payload length equals dtype_size * prod(shape). Errors name the file.
Tensor read_tensor(const std::filesystem::path& path);

// Validates only the header and the file size.
TensorHeader read_tensor_header(const std::filesystem::path& path);

}  // namespace vad
