#include "sigcore/array_io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <iterator>
#include <limits>

namespace sigcore {

namespace {

constexpr std::string_view magic = "SGT1";
constexpr std::size_t header_size = 6;

template <class T>
using Bits = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;

template <class U>
void put_le(std::vector<std::byte>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<std::byte>((value >> (8 * i)) & 0xFF));
  }
}

template <class U>
U get_le(const std::byte* p) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(std::to_integer<unsigned>(p[i])) << (8 * i);
  }
  return value;
}

template <class T>
constexpr DType dtype_of() {
  return sizeof(T) == 8 ? DType::f64 : DType::f32;
}

template <class T>
Array<T> decode_payload(std::span<const std::byte> bytes, std::vector<std::uint64_t> dims,
                        std::uint64_t count, std::size_t offset) {
  Array<T> out;
  out.dims = std::move(dims);
  out.values.resize(count);
  const std::byte* p = bytes.data() + offset;
  for (std::uint64_t i = 0; i < count; ++i, p += sizeof(T)) {
    out.values[i] = std::bit_cast<T>(get_le<Bits<T>>(p));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

template <class T>
std::vector<std::byte> encode_array(const Array<T>& array) {
  if (array.dims.empty() || array.dims.size() > 3) {
    throw std::invalid_argument("encode_array: arrays must have 1 to 3 dimensions");
  }
  std::uint64_t count = 1;
  for (const auto d : array.dims) count *= d;
  if (count != array.values.size()) {
    throw std::invalid_argument("encode_array: extents do not match the number of values");
  }
  std::vector<std::byte> out;
  out.reserve(header_size + 8 * array.dims.size() + sizeof(T) * array.values.size());
  for (const char c : magic) out.push_back(static_cast<std::byte>(c));
  out.push_back(static_cast<std::byte>(dtype_of<T>()));
  out.push_back(static_cast<std::byte>(array.dims.size()));
  for (const auto d : array.dims) put_le<std::uint64_t>(out, d);
  for (const T v : array.values) put_le<Bits<T>>(out, std::bit_cast<Bits<T>>(v));
  return out;
}

AnyArray decode_array(std::span<const std::byte> bytes) {
  if (bytes.size() < header_size) throw FormatError("truncated header", bytes.size());
  for (std::size_t i = 0; i < magic.size(); ++i) {
    if (std::to_integer<char>(bytes[i]) != magic[i]) throw FormatError("bad magic", i);
  }
  const auto code = std::to_integer<unsigned>(bytes[4]);
  if (code > 1) throw FormatError("unknown dtype code " + std::to_string(code), 4);
  const std::size_t scalar = code == 0 ? 8 : 4;
  const auto ndim = std::to_integer<unsigned>(bytes[5]);
  if (ndim < 1 || ndim > 3) throw FormatError("ndim must be 1, 2 or 3", 5);

  std::size_t offset = header_size;
  if (bytes.size() < offset + 8 * ndim) throw FormatError("truncated extents", bytes.size());
  std::vector<std::uint64_t> dims(ndim);
  std::uint64_t count = 1;
  constexpr auto max = std::numeric_limits<std::uint64_t>::max();
  for (unsigned i = 0; i < ndim; ++i, offset += 8) {
    dims[i] = get_le<std::uint64_t>(bytes.data() + offset);
    if (dims[i] != 0 && count > max / dims[i]) throw FormatError("extents overflow", offset);
    count *= dims[i];
  }
  if (count > max / scalar) throw FormatError("payload size overflows", header_size);

  const std::uint64_t payload = count * scalar;
  const std::uint64_t available = bytes.size() - offset;
  if (available < payload) throw FormatError("truncated payload", bytes.size());
  if (available > payload) throw FormatError("trailing bytes after payload", offset + payload);

  if (code == 0) return decode_payload<double>(bytes, std::move(dims), count, offset);
  return decode_payload<float>(bytes, std::move(dims), count, offset);
}

Array<double> parse_csv(std::string_view text) {
  Array<double> out;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    const std::size_t line_start = pos;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::size_t fields = 0;
    std::size_t field_start = 0;
    while (true) {
      std::size_t comma = line.find(',', field_start);
      if (comma == std::string_view::npos) comma = line.size();
      std::string_view field = line.substr(field_start, comma - field_start);
      std::size_t lead = field.find_first_not_of(" \t");
      const std::size_t at = line_start + field_start + (lead == std::string_view::npos ? 0 : lead);
      if (lead == std::string_view::npos) throw FormatError("empty CSV field", at);
      field.remove_prefix(lead);
      field = field.substr(0, field.find_last_not_of(" \t") + 1);
      double value = 0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw FormatError("invalid number '" + std::string(field) + "'", at);
      }
      out.values.push_back(value);
      ++fields;
      if (comma == line.size()) break;
      field_start = comma + 1;
    }
    if (rows == 0) {
      cols = fields;
    } else if (fields != cols) {
      throw FormatError("expected " + std::to_string(cols) + " columns", line_start);
    }
    ++rows;
  }
  if (rows == 0) throw FormatError("empty CSV input", 0);
  out.dims = {rows, cols};
  return out;
}

AnyArray read_array(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  if (path.extension() == ".csv") return parse_csv(content);
  return decode_array(std::as_bytes(std::span(content.data(), content.size())));
}

template <class T>
void write_array(const Array<T>& array, const std::filesystem::path& path) {
  const auto bytes = encode_array(array);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

template <class T>
Array<T> convert_array(const AnyArray& array) {
  return std::visit(
      [](const auto& a) {
        Array<T> out;
        out.dims = a.dims;
        out.values.assign(a.values.begin(), a.values.end());
        return out;
      },
      array);
}

template std::vector<std::byte> encode_array<double>(const Array<double>&);
template std::vector<std::byte> encode_array<float>(const Array<float>&);
template void write_array<double>(const Array<double>&, const std::filesystem::path&);
template void write_array<float>(const Array<float>&, const std::filesystem::path&);
template Array<double> convert_array<double>(const AnyArray&);
template Array<float> convert_array<float>(const AnyArray&);

} // namespace sigcore
