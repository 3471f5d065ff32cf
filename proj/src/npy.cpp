#include "uqeval/npy.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <optional>

namespace uqeval {

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicSize = 6;
constexpr std::size_t kAlignment = 64;

[[noreturn]] void bad_header(const std::filesystem::path& path, const std::string& why) {
  throw Error(ErrorKind::BadHeader, path.string() + ": " + why);
}

// Minimal parser for the header's Python dict literal.
class DictParser {
 public:
  DictParser(std::string_view text, const std::filesystem::path& path) : text_(text), path_(path) {}

  void parse(NpyHeader& h) {
    bool seen_descr = false, seen_order = false, seen_shape = false;
    expect('{');
    for (;;) {
      skip_space();
      if (peek() == '}') break;
      const std::string key = quoted();
      expect(':');
      skip_space();
      if (key == "descr") {
        h.descr = quoted();
        seen_descr = true;
      } else if (key == "fortran_order") {
        h.fortran_order = boolean();
        seen_order = true;
      } else if (key == "shape") {
        h.shape = tuple();
        seen_shape = true;
      } else {
        bad_header(path_, "unexpected header key '" + key + "'");
      }
      skip_space();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_space();
      if (peek() != '}') bad_header(path_, "malformed header dictionary");
    }
    if (!seen_descr || !seen_order || !seen_shape) {
      bad_header(path_, "header must define descr, fortran_order and shape");
    }
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_space();
    if (peek() != c) bad_header(path_, std::string("expected '") + c + "' in header");
    ++pos_;
  }
  std::string quoted() {
    skip_space();
    const char q = peek();
    if (q != '\'' && q != '"') bad_header(path_, "expected a quoted string in header");
    const auto end = text_.find(q, pos_ + 1);
    if (end == std::string_view::npos) bad_header(path_, "unterminated string in header");
    std::string out(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return out;
  }
  bool boolean() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    bad_header(path_, "expected True or False in header");
  }
  std::vector<std::size_t> tuple() {
    expect('(');
    std::vector<std::size_t> dims;
    for (;;) {
      skip_space();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) bad_header(path_, "malformed shape tuple");
      std::size_t v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) v = v * 10 + static_cast<std::size_t>(text_[pos_++] - '0');
      dims.push_back(v);
      skip_space();
      if (peek() == ',') ++pos_;
    }
  }

  std::string_view text_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

void parse_descr(NpyHeader& h, const std::filesystem::path& path) {
  if (h.descr.size() < 3) bad_header(path, "unsupported dtype '" + h.descr + "'");
  const char order = h.descr[0];
  const char kind = h.descr[1];
  const std::string size_text = h.descr.substr(2);
  if (!std::all_of(size_text.begin(), size_text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    bad_header(path, "unsupported dtype '" + h.descr + "'");
  }
  h.item_size = static_cast<std::size_t>(std::stoul(size_text));
  h.big_endian = order == '>';
  if (order != '<' && order != '>' && order != '|' && order != '=') bad_header(path, "bad byte order in '" + h.descr + "'");
  switch (kind) {
    case 'f': h.kind = NpyKind::Float; break;
    case 'i': h.kind = NpyKind::SignedInt; break;
    case 'u': h.kind = NpyKind::UnsignedInt; break;
    case 'b': h.kind = NpyKind::Bool; break;
    default: bad_header(path, "unsupported dtype '" + h.descr + "'");
  }
  const bool ok_size = h.kind == NpyKind::Float ? (h.item_size == 4 || h.item_size == 8)
                                                : (h.item_size == 1 || h.item_size == 2 || h.item_size == 4 || h.item_size == 8);
  if (!ok_size) bad_header(path, "unsupported item size in '" + h.descr + "'");
}

std::vector<char> read_payload(const std::filesystem::path& path, NpyHeader& h) {
  h = read_npy_header(path);
  if (h.fortran_order) bad_header(path, "Fortran-ordered arrays are not supported");
  std::ifstream in(path, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(h.data_offset));
  std::vector<char> bytes(h.count() * h.item_size);
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw Error(ErrorKind::IoError, path.string() + ": payload truncated (" + std::to_string(in.gcount()) + " of " +
                                        std::to_string(bytes.size()) + " bytes)");
  }
  if (h.big_endian && h.item_size > 1) {
    for (std::size_t i = 0; i < bytes.size(); i += h.item_size) {
      std::reverse(bytes.begin() + static_cast<std::ptrdiff_t>(i),
                   bytes.begin() + static_cast<std::ptrdiff_t>(i + h.item_size));
    }
  }
  return bytes;
}

template <typename T>
T load(const char* p) noexcept {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

std::string shape_literal(std::span<const std::size_t> shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) s += shape.size() == 1 ? "," : ", ";
  }
  return s + ")";
}

void write_raw(const std::filesystem::path& path, const std::string& descr, std::span<const std::size_t> shape,
               const char* data, std::size_t bytes) {
  std::string dict = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': " + shape_literal(shape) + ", }";
  const std::size_t preamble = kMagicSize + 2 + 2;
  std::size_t total = preamble + dict.size() + 1;
  const std::size_t pad = (kAlignment - total % kAlignment) % kAlignment;
  dict.append(pad, ' ');
  dict.push_back('\n');
  if (dict.size() > 0xFFFF) throw Error(ErrorKind::IoError, path.string() + ": NPY header too long");

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out.write(kMagic, kMagicSize);
  out.put(1);
  out.put(0);
  const auto len = static_cast<std::uint16_t>(dict.size());
  out.put(static_cast<char>(len & 0xFF));
  out.put(static_cast<char>(len >> 8));
  out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  out.write(data, static_cast<std::streamsize>(bytes));
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

std::size_t product(std::span<const std::size_t> shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

}  // namespace

std::size_t NpyHeader::count() const noexcept { return product(shape); }

NpyHeader read_npy_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());
  char magic[kMagicSize];
  in.read(magic, kMagicSize);
  if (in.gcount() != static_cast<std::streamsize>(kMagicSize) || std::memcmp(magic, kMagic, kMagicSize) != 0) {
    bad_header(path, "missing NPY magic string");
  }
  const int major = in.get();
  const int minor = in.get();
  if (!in || major < 1 || major > 3 || minor != 0) {
    bad_header(path, "unsupported NPY version " + std::to_string(major) + "." + std::to_string(minor));
  }
  std::size_t header_len = 0;
  const int len_bytes = major == 1 ? 2 : 4;
  for (int i = 0; i < len_bytes; ++i) {
    const int b = in.get();
    if (!in) bad_header(path, "truncated header length");
    header_len |= static_cast<std::size_t>(b) << (8 * i);
  }
  std::string dict(header_len, '\0');
  in.read(dict.data(), static_cast<std::streamsize>(header_len));
  if (static_cast<std::size_t>(in.gcount()) != header_len) bad_header(path, "truncated header");

  NpyHeader h;
  DictParser(dict, path).parse(h);
  parse_descr(h, path);
  h.data_offset = kMagicSize + 2 + static_cast<std::size_t>(len_bytes) + header_len;
  return h;
}

std::vector<double> read_npy_floats(const std::filesystem::path& path, NpyHeader* header) {
  NpyHeader h;
  const auto bytes = read_payload(path, h);
  if (h.kind != NpyKind::Float) bad_header(path, "expected a floating-point array, found '" + h.descr + "'");
  std::vector<double> out(h.count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const char* p = bytes.data() + i * h.item_size;
    out[i] = h.item_size == 4 ? static_cast<double>(load<float>(p)) : load<double>(p);
  }
  if (header != nullptr) *header = h;
  return out;
}

std::vector<std::int64_t> read_npy_ints(const std::filesystem::path& path, NpyHeader* header) {
  NpyHeader h;
  const auto bytes = read_payload(path, h);
  if (h.kind == NpyKind::Float) bad_header(path, "expected an integer array, found '" + h.descr + "'");
  std::vector<std::int64_t> out(h.count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const char* p = bytes.data() + i * h.item_size;
    const bool is_signed = h.kind == NpyKind::SignedInt;
    switch (h.item_size) {
      case 1: out[i] = is_signed ? load<std::int8_t>(p) : load<std::uint8_t>(p); break;
      case 2: out[i] = is_signed ? load<std::int16_t>(p) : load<std::uint16_t>(p); break;
      case 4: out[i] = is_signed ? load<std::int32_t>(p) : static_cast<std::int64_t>(load<std::uint32_t>(p)); break;
      default: out[i] = is_signed ? load<std::int64_t>(p) : static_cast<std::int64_t>(load<std::uint64_t>(p)); break;
    }
  }
  if (header != nullptr) *header = h;
  return out;
}

void write_npy(const std::filesystem::path& path, std::span<const double> values, std::span<const std::size_t> shape,
               bool float32) {
  if (product(shape) != values.size()) throw Error(ErrorKind::ShapeError, "shape does not match the value count");
  if (float32) {
    std::vector<float> narrow(values.begin(), values.end());
    write_raw(path, "<f4", shape, reinterpret_cast<const char*>(narrow.data()), narrow.size() * sizeof(float));
  } else {
    write_raw(path, "<f8", shape, reinterpret_cast<const char*>(values.data()), values.size() * sizeof(double));
  }
}

void write_npy(const std::filesystem::path& path, std::span<const std::int32_t> values,
               std::span<const std::size_t> shape) {
  if (product(shape) != values.size()) throw Error(ErrorKind::ShapeError, "shape does not match the value count");
  write_raw(path, "<i4", shape, reinterpret_cast<const char*>(values.data()), values.size() * sizeof(std::int32_t));
}

SampleGrid read_grid(const std::filesystem::path& path) {
  NpyHeader h = read_npy_header(path);
  if (h.shape.size() != 5) {
    throw Error(ErrorKind::ShapeRankError, path.string() + ": grid must be rank 5 [M][N][C][H][W], got rank " +
                                               std::to_string(h.shape.size()));
  }
  auto values = read_npy_floats(path, &h);
  const GridShape shape{h.shape[0], h.shape[1], h.shape[2], h.shape[3], h.shape[4]};
  try {
    return SampleGrid(shape, std::move(values));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_grid(const SampleGrid& grid, const std::filesystem::path& path, bool float32) {
  const auto& s = grid.shape();
  const std::size_t shape[] = {s.instances, s.samples, s.classes, s.rows, s.cols};
  write_npy(path, grid.values(), shape, float32);
}

LabelMap read_label_map(const std::filesystem::path& path) {
  NpyHeader h;
  const auto values = read_npy_ints(path, &h);
  if (h.shape.size() != 2) {
    throw Error(ErrorKind::ShapeRankError, path.string() + ": label map must be rank 2 [H][W], got rank " +
                                               std::to_string(h.shape.size()));
  }
  std::vector<std::int32_t> labels(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0 || values[i] > std::numeric_limits<std::int32_t>::max()) {
      throw Error(ErrorKind::LabelRangeError, path.string() + ": label " + std::to_string(values[i]) + " at flat index " +
                                                  std::to_string(i) + " is out of range");
    }
    labels[i] = static_cast<std::int32_t>(values[i]);
  }
  return LabelMap(h.shape[0], h.shape[1], std::move(labels));
}

void write_label_map(const LabelMap& labels, const std::filesystem::path& path) {
  const std::size_t shape[] = {labels.rows(), labels.cols()};
  write_npy(path, labels.values(), shape);
}

void write_uncertainty_maps(const UncertaintyMaps& maps, const std::filesystem::path& path) {
  const std::size_t shape[] = {3, maps.au.rows(), maps.au.cols()};
  std::vector<double> values;
  values.reserve(3 * maps.au.size());
  for (const Map* m : {&maps.au, &maps.eu, &maps.tu}) values.insert(values.end(), m->values().begin(), m->values().end());
  write_npy(path, values, shape);
}

UncertaintyMaps read_uncertainty_maps(const std::filesystem::path& path) {
  NpyHeader h;
  auto values = read_npy_floats(path, &h);
  if (h.shape.size() != 3 || h.shape[0] != 3) {
    throw Error(ErrorKind::ShapeRankError, path.string() + ": uncertainty maps must have shape [3][H][W]");
  }
  const std::size_t n = h.shape[1] * h.shape[2];
  const auto slice = [&](std::size_t k) {
    return Map(h.shape[1], h.shape[2], std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(k * n),
                                                           values.begin() + static_cast<std::ptrdiff_t>((k + 1) * n)));
  };
  return {slice(0), slice(1), slice(2)};
}

}  // namespace uqeval
