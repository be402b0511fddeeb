#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "siftmatch/descriptor.hpp"
#include "siftmatch/errors.hpp"

namespace siftmatch {
namespace {

constexpr std::string_view kTextHeader = "SIFTD v1 text m=";
constexpr std::array<char, 8> kBinaryMagic{'S', 'I', 'F', 'T', 'D', 'B', '0', '1'};

template <typename T>
T parse_number(std::string_view token, std::size_t line) {
  T value{};
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw FormatError("line " + std::to_string(line) + ": cannot parse '" + std::string(token) +
                      "'");
  }
  return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Applies the norm policy to a freshly parsed descriptor.
Descriptor check_norm(Descriptor d, std::size_t index, double tolerance,
                      const LoadOptions& options) {
  const double norm = d.norm();
  if (std::abs(norm - 1.0) <= tolerance) return d;
  if (options.on_warning) {
    options.on_warning("descriptor " + std::to_string(index) + " has L2 norm " +
                       std::to_string(norm) +
                       (options.auto_normalize ? "; renormalizing" : "; left as is"));
  }
  if (!options.auto_normalize) return d;
  try {
    return normalize(d);
  } catch (const std::invalid_argument& e) {
    throw FormatError("descriptor " + std::to_string(index) + ": " + e.what());
  }
}

DescriptorSet read_text(std::istream& in, const LoadOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (!line.starts_with(kTextHeader)) throw FormatError("malformed header: '" + line + "'");
  const auto count = parse_number<std::size_t>(std::string_view(line).substr(kTextHeader.size()), 1);
  if (count == 0) throw FormatError("empty set");

  DescriptorSet set;
  set.descriptors.reserve(count);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (set.size() == count) {
      throw FormatError("line " + std::to_string(line_no) + ": more descriptors than header m=" +
                        std::to_string(count));
    }
    if (tokens.size() != kDescriptorLength + 2) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(kDescriptorLength + 2) + " fields, found " +
                        std::to_string(tokens.size()));
    }
    PixelCoord xy{parse_number<std::uint16_t>(tokens[0], line_no),
                  parse_number<std::uint16_t>(tokens[1], line_no)};
    Descriptor::RealElements elements{};
    for (std::size_t i = 0; i < kDescriptorLength; ++i) {
      elements[i] = parse_number<double>(tokens[i + 2], line_no);
    }
    Descriptor d;
    try {
      d = Descriptor::from_real(elements, xy);
    } catch (const std::invalid_argument& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
    set.descriptors.push_back(check_norm(std::move(d), set.size(), options.norm_tolerance, options));
  }
  if (set.size() != count) {
    throw FormatError("header declares m=" + std::to_string(count) + " but file holds " +
                      std::to_string(set.size()) + " descriptors");
  }
  return set;
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u16(std::ostream& out, std::uint16_t v) {
  const char bytes[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
  out.write(bytes, 2);
}

DescriptorSet read_binary(std::istream& in, const LoadOptions& options) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kBinaryMagic) {
    throw FormatError("bad magic; not a SIFTDB01 file");
  }
  unsigned char count_bytes[4];
  if (!in.read(reinterpret_cast<char*>(count_bytes), 4)) throw FormatError("truncated header");
  const std::uint32_t count = static_cast<std::uint32_t>(count_bytes[0]) |
                              (static_cast<std::uint32_t>(count_bytes[1]) << 8) |
                              (static_cast<std::uint32_t>(count_bytes[2]) << 16) |
                              (static_cast<std::uint32_t>(count_bytes[3]) << 24);
  if (count == 0) throw FormatError("empty set");

  const double tolerance = options.norm_tolerance + quantized_norm_slack();
  DescriptorSet set;
  set.descriptors.reserve(count);
  std::array<unsigned char, kDescriptorBytes> record{};
  for (std::uint32_t k = 0; k < count; ++k) {
    if (!in.read(reinterpret_cast<char*>(record.data()), record.size())) {
      throw FormatError("truncated at descriptor " + std::to_string(k) + " of " +
                        std::to_string(count));
    }
    PixelCoord xy{get_u16(&record[0]), get_u16(&record[2])};
    Descriptor::RawElements raws{};
    for (std::size_t i = 0; i < kDescriptorLength; ++i) raws[i] = get_u16(&record[4 + 2 * i]);
    Descriptor d;
    try {
      d = Descriptor::from_raw(raws, xy);
    } catch (const std::invalid_argument& e) {
      throw FormatError("descriptor " + std::to_string(k) + ": " + e.what());
    }
    set.descriptors.push_back(check_norm(std::move(d), k, tolerance, options));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after " + std::to_string(count) + " descriptors");
  }
  return set;
}

void write_text(const DescriptorSet& set, std::ostream& out) {
  out << kTextHeader << set.size() << '\n';
  std::array<char, 64> buf{};
  for (const auto& d : set.descriptors) {
    out << d.location().x << ' ' << d.location().y;
    for (double v : d.real()) {
      // Shortest round-trip representation keeps save/load bit-exact.
      const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
      out << ' ' << std::string_view(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
    }
    out << '\n';
  }
}

void write_binary(const DescriptorSet& set, std::ostream& out) {
  out.write(kBinaryMagic.data(), kBinaryMagic.size());
  const auto count = static_cast<std::uint32_t>(set.size());
  const char count_bytes[4] = {static_cast<char>(count & 0xFF), static_cast<char>((count >> 8) & 0xFF),
                               static_cast<char>((count >> 16) & 0xFF),
                               static_cast<char>((count >> 24) & 0xFF)};
  out.write(count_bytes, 4);
  for (const auto& d : set.descriptors) {
    put_u16(out, d.location().x);
    put_u16(out, d.location().y);
    for (std::uint16_t raw : d.raw()) put_u16(out, raw);
  }
}

}  // namespace

double quantized_norm_slack() {
  return std::sqrt(static_cast<double>(kDescriptorLength)) *
         std::ldexp(1.0, -(kElementFormat.fraction_bits + 1));
}

DescriptorFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".siftd") return DescriptorFormat::text;
  if (ext == ".siftdb") return DescriptorFormat::binary;
  throw FormatError("unrecognized descriptor file extension '" + ext + "' (want .siftd or .siftdb)");
}

DescriptorSet read_descriptor_set(std::istream& in, DescriptorFormat format,
                                  const LoadOptions& options) {
  return format == DescriptorFormat::text ? read_text(in, options) : read_binary(in, options);
}

void write_descriptor_set(const DescriptorSet& set, std::ostream& out, DescriptorFormat format) {
  if (set.empty()) throw std::invalid_argument("cannot save an empty descriptor set");
  if (set.size() > 0xFFFFFFFFu) throw std::invalid_argument("descriptor set too large");
  if (format == DescriptorFormat::text) {
    write_text(set, out);
  } else {
    write_binary(set, out);
  }
}

DescriptorSet load_descriptor_set(const std::filesystem::path& path, DescriptorFormat format,
                                  const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  DescriptorSet set = read_descriptor_set(in, format, options);
  set.image_id = path.stem().string();
  return set;
}

DescriptorSet load_descriptor_set(const std::filesystem::path& path, const LoadOptions& options) {
  return load_descriptor_set(path, format_from_path(path), options);
}

void save_descriptor_set(const DescriptorSet& set, const std::filesystem::path& path,
                         DescriptorFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_descriptor_set(set, out, format);
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void save_descriptor_set(const DescriptorSet& set, const std::filesystem::path& path) {
  save_descriptor_set(set, path, format_from_path(path));
}

}  // namespace siftmatch
