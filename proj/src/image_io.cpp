#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

#include "myriad/error.hpp"
#include "myriad/imaging.hpp"

namespace myriad {

namespace {

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::IoFailure, "read failed: " + path.string());
  return buf;
}

void spill(const std::filesystem::path& path, const std::vector<unsigned char>& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<unsigned char>& b) : b_(b) {}

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n' && b_[pos_] != '\r') ++pos_;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number(const char* what) {
    skip_space_and_comments();
    unsigned long v = 0;
    std::size_t digits = 0;
    while (pos_ < b_.size() && b_[pos_] >= '0' && b_[pos_] <= '9') {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 0xFFFFFFFFUL) throw Error(Errc::MalformedHeader, std::string("PGM ") + what + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(Errc::MalformedHeader, std::string("PGM header: expected ") + what);
    return v;
  }

  std::size_t& pos() { return pos_; }

 private:
  const std::vector<unsigned char>& b_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_le(const std::vector<unsigned char>& b, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
  return v;
}

constexpr std::size_t kMyrHeader = 24;

struct Raster {
  std::size_t width;
  std::size_t height;
  RasterKind kind;
  std::vector<double> values;
};

Raster parse_myr(const std::vector<unsigned char>& b, bool with_payload) {
  if (b.size() < kMyrHeader) throw Error(Errc::MalformedHeader, "MYR1 header truncated");
  if (std::memcmp(b.data(), "MYR1", 4) != 0) throw Error(Errc::MalformedHeader, "missing MYR1 magic");
  Raster r;
  r.width = get_le(b, 4, 4);
  r.height = get_le(b, 8, 4);
  const auto kind = static_cast<std::uint32_t>(get_le(b, 12, 4));
  if (r.width == 0 || r.height == 0) throw Error(Errc::MalformedHeader, "MYR1 width and height must be positive");
  if (kind > 1) throw Error(Errc::MalformedHeader, "MYR1 kind must be 0 or 1, got " + std::to_string(kind));
  r.kind = static_cast<RasterKind>(kind);
  if (!with_payload) return r;
  const std::size_t count = r.width * r.height;
  if ((b.size() - kMyrHeader) / 8 < count || b.size() - kMyrHeader != count * 8) {
    throw Error(Errc::MalformedHeader, "MYR1 payload size does not match " + std::to_string(r.width) + "x" +
                                           std::to_string(r.height));
  }
  r.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = std::bit_cast<double>(get_le(b, kMyrHeader + 8 * i, 8));
    if (!std::isfinite(v)) {
      throw Error(Errc::MalformedHeader, "non-finite value at row " + std::to_string(i / r.width) + ", column " +
                                             std::to_string(i % r.width));
    }
    r.values[i] = v;
  }
  return r;
}

void write_myr(const std::filesystem::path& path, std::size_t w, std::size_t h, RasterKind kind,
               std::span<const double> v) {
  if (w > 0xFFFFFFFFu || h > 0xFFFFFFFFu) throw Error(Errc::InvalidArgument, "image too large for MYR1");
  std::vector<unsigned char> b;
  b.reserve(kMyrHeader + 8 * v.size());
  b.insert(b.end(), {'M', 'Y', 'R', '1'});
  put_u32(b, static_cast<std::uint32_t>(w));
  put_u32(b, static_cast<std::uint32_t>(h));
  put_u32(b, static_cast<std::uint32_t>(kind));
  put_u64(b, 0);
  for (double x : v) put_u64(b, std::bit_cast<std::uint64_t>(x));
  spill(path, b);
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  const auto b = slurp(path);
  if (b.size() < 2 || b[0] != 'P' || b[1] != '5') throw Error(Errc::MalformedHeader, "not a binary PGM (P5)");
  HeaderReader hr(b);
  hr.pos() = 2;
  const unsigned long w = hr.number("width");
  const unsigned long h = hr.number("height");
  const unsigned long maxval = hr.number("maxval");
  if (w == 0 || h == 0) throw Error(Errc::MalformedHeader, "PGM width and height must be positive");
  if (maxval == 0 || maxval > 65535) throw Error(Errc::MalformedHeader, "PGM maxval must be in [1, 65535]");
  std::size_t& pos = hr.pos();
  if (pos >= b.size() || !std::isspace(b[pos])) throw Error(Errc::MalformedHeader, "PGM header not terminated");
  ++pos;
  const std::size_t bytes = maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(w) * h;
  if ((b.size() - pos) / bytes < count) throw Error(Errc::MalformedHeader, "PGM payload truncated");
  std::vector<double> px(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned v = bytes == 1 ? b[pos + i] : (static_cast<unsigned>(b[pos + 2 * i]) << 8) | b[pos + 2 * i + 1];
    if (v > maxval) throw Error(Errc::MalformedHeader, "PGM sample exceeds maxval at index " + std::to_string(i));
    px[i] = v;
  }
  return Image(w, h, std::move(px), static_cast<double>(maxval));
}

PgmWriteReport write_pgm(const std::filesystem::path& path, const Image& img) {
  const double mv = std::nearbyint(img.peak());
  if (!(mv >= 1.0 && mv <= 65535.0)) throw Error(Errc::InvalidArgument, "PGM peak must round to [1, 65535]");
  const auto maxval = static_cast<unsigned>(mv);
  PgmWriteReport rep;
  std::string head = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n" +
                     std::to_string(maxval) + "\n";
  std::vector<unsigned char> b(head.begin(), head.end());
  const bool wide = maxval > 255;
  for (double v : img.pixels()) {
    double r = std::nearbyint(v);
    if (r < 0.0) {
      r = 0.0;
      ++rep.clamped_low;
    } else if (r > mv) {
      r = mv;
      ++rep.clamped_high;
    }
    const auto q = static_cast<unsigned>(r);
    if (wide) b.push_back(static_cast<unsigned char>(q >> 8));
    b.push_back(static_cast<unsigned char>(q & 0xFF));
  }
  spill(path, b);
  return rep;
}

RasterKind peek_f64_kind(const std::filesystem::path& path) { return parse_myr(slurp(path), false).kind; }

Image read_f64_image(const std::filesystem::path& path, double peak) {
  Raster r = parse_myr(slurp(path), true);
  if (r.kind != RasterKind::real) throw Error(Errc::KindMismatch, "raster holds angles, expected a real image");
  return Image(r.width, r.height, std::move(r.values), peak);
}

S1Image read_f64_s1(const std::filesystem::path& path) {
  Raster r = parse_myr(slurp(path), true);
  if (r.kind != RasterKind::circular) throw Error(Errc::KindMismatch, "raster holds a real image, expected angles");
  constexpr double pi = std::numbers::pi;
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    if (!(r.values[i] >= -pi && r.values[i] < pi)) {
      throw Error(Errc::MalformedHeader, "angle outside [-pi, pi) at index " + std::to_string(i));
    }
  }
  return S1Image(r.width, r.height, std::move(r.values));
}

void write_f64(const std::filesystem::path& path, const Image& img) {
  write_myr(path, img.width(), img.height(), RasterKind::real, img.pixels());
}

void write_f64(const std::filesystem::path& path, const S1Image& img) {
  write_myr(path, img.width(), img.height(), RasterKind::circular, img.angles());
}

}  // namespace myriad
