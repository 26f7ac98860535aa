#include "csc/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <cctype>
#include <limits>
#include <sstream>

#include "csc/error.hpp"

namespace csc::io {

namespace {

constexpr char kDictMagic[8] = {'C', 'D', 'I', 'C', 'T', '1', '\0', '\0'};
constexpr char kImageMagic[8] = {'C', 'I', 'M', 'G', '1', '\0', '\0', '\0'};

static_assert(std::numeric_limits<double>::is_iec559);

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
public:
  Reader(const std::vector<std::uint8_t>& bytes, const char* what) : bytes_(bytes), what_(what) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw FormatError(std::string(what_) + ": truncated at byte " + std::to_string(pos_));
    }
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  void expect_magic(const char (&magic)[8]) {
    need(8);
    if (std::memcmp(bytes_.data(), magic, 8) != 0) {
      throw FormatError(std::string(what_) + ": bad magic");
    }
    pos_ = 8;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

private:
  const std::vector<std::uint8_t>& bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw FormatError(std::string(what) + " does not fit in u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_dictionary(const Dictionary& d) {
  std::vector<std::uint8_t> out(kDictMagic, kDictMagic + 8);
  put_u32(out, checked_u32(d.filter_height(), "filter_h"));
  put_u32(out, checked_u32(d.filter_width(), "filter_w"));
  put_u32(out, checked_u32(d.num_filters(), "num_filters"));
  put_u32(out, d.normalized() ? 1u : 0u);
  for (double v : d.values()) put_f64(out, v);
  return out;
}

Dictionary decode_dictionary(const std::vector<std::uint8_t>& bytes) {
  Reader in(bytes, "CDICT1");
  in.expect_magic(kDictMagic);
  const std::uint32_t fh = in.u32();
  const std::uint32_t fw = in.u32();
  const std::uint32_t nf = in.u32();
  const std::uint32_t flags = in.u32();
  if (fh == 0 || fw == 0 || nf == 0) throw FormatError("CDICT1: zero dimension");
  const std::size_t count = std::size_t(fh) * fw * nf;
  in.need(count * 8);
  std::vector<double> values(count);
  for (double& v : values) v = in.f64();
  if (!in.at_end()) throw FormatError("CDICT1: trailing bytes after filter data");
  try {
    return Dictionary(fh, fw, nf, std::move(values), (flags & 1u) != 0);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("CDICT1: ") + e.what());
  }
}

std::vector<std::uint8_t> encode_cimg(const Image& img) {
  std::vector<std::uint8_t> out(kImageMagic, kImageMagic + 8);
  put_u32(out, checked_u32(img.height(), "height"));
  put_u32(out, checked_u32(img.width(), "width"));
  for (double v : img.values()) put_f64(out, v);
  return out;
}

Image decode_cimg(const std::vector<std::uint8_t>& bytes) {
  Reader in(bytes, "CIMG1");
  in.expect_magic(kImageMagic);
  const std::uint32_t h = in.u32();
  const std::uint32_t w = in.u32();
  if (h == 0 || w == 0) throw FormatError("CIMG1: zero dimension");
  in.need(std::size_t(h) * w * 8);
  std::vector<double> values(std::size_t(h) * w);
  for (double& v : values) v = in.f64();
  if (!in.at_end()) throw FormatError("CIMG1: trailing bytes after sample data");
  try {
    return Image(h, w, std::move(values));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("CIMG1: ") + e.what());
  }
}

std::vector<std::uint8_t> encode_pgm(const Image& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.size());
  for (double v : img.values()) {
    const double q = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
    out.push_back(static_cast<std::uint8_t>(q));
  }
  return out;
}

Image decode_pgm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> std::size_t {
    skip_space();
    std::size_t v = 0;
    std::size_t digits = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (++digits > 9) throw FormatError("PGM: header value too large");
    }
    if (digits == 0) throw FormatError("PGM: malformed header");
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("PGM: only binary P5 images are supported");
  }
  pos = 2;
  const std::size_t w = number();
  const std::size_t h = number();
  const std::size_t maxval = number();
  if (w == 0 || h == 0) throw FormatError("PGM: zero dimension");
  if (maxval == 0 || maxval > 255) throw FormatError("PGM: only 8-bit maxval is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError("PGM: malformed header");
  ++pos;
  if (bytes.size() - pos < w * h) throw FormatError("PGM: truncated pixel data");
  std::vector<double> values(w * h);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = double(bytes[pos + i]) / double(maxval);
  return Image(h, w, std::move(values));
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("read failed for " + path.string());
  return bytes;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

namespace {

template <class T, class Decode>
T decode_file(const std::filesystem::path& path, Decode decode) {
  const auto bytes = read_bytes(path);
  try {
    return decode(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

void write_dictionary(const std::filesystem::path& path, const Dictionary& d) {
  write_bytes(path, encode_dictionary(d));
}
Dictionary read_dictionary(const std::filesystem::path& path) {
  return decode_file<Dictionary>(path, decode_dictionary);
}
void write_cimg(const std::filesystem::path& path, const Image& img) {
  write_bytes(path, encode_cimg(img));
}
Image read_cimg(const std::filesystem::path& path) { return decode_file<Image>(path, decode_cimg); }
void write_pgm(const std::filesystem::path& path, const Image& img) {
  write_bytes(path, encode_pgm(img));
}
Image read_pgm(const std::filesystem::path& path) { return decode_file<Image>(path, decode_pgm); }

Image read_image(const std::filesystem::path& path) {
  return decode_file<Image>(path, [](const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes);
    return decode_cimg(bytes);
  });
}

void write_image(const std::filesystem::path& path, const Image& img) {
  if (path.extension() == ".pgm") {
    write_pgm(path, img);
  } else {
    write_cimg(path, img);
  }
}

std::string checksum(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

std::string file_checksum(const std::filesystem::path& path) { return checksum(read_bytes(path)); }

}  // namespace csc::io
