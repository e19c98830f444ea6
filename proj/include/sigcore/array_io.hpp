#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sigcore {

// SGT1 array files:
//   bytes 0..3   magic "SGT1"
//   byte  4      dtype: 0 = float64, 1 = float32
//   byte  5      ndim, 1..3
//   then ndim    little-endian uint64 extents
//   then         row-major little-endian payload
enum class DType : std::uint8_t { f64 = 0, f32 = 1 };

template <class T>
struct Array {
  std::vector<std::uint64_t> dims;
  std::vector<T> values;
};

using AnyArray = std::variant<Array<double>, Array<float>>;

class FormatError : public std::runtime_error {
public:
  FormatError(const std::string& message, std::uint64_t offset)
      : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

private:
  std::uint64_t offset_;
};

template <class T>
std::vector<std::byte> encode_array(const Array<T>& array);

AnyArray decode_array(std::span<const std::byte> bytes);

// CSV with one point per line and comma-separated coordinates; returns an
// L x d array. Blank lines are skipped.
Array<double> parse_csv(std::string_view text);

// Files ending in .csv are parsed as CSV, everything else as SGT1.
AnyArray read_array(const std::filesystem::path& path);

template <class T>
void write_array(const Array<T>& array, const std::filesystem::path& path);

template <class T>
Array<T> convert_array(const AnyArray& array);

} // namespace sigcore
