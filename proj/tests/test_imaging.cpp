#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include "doctest.h"
#include "myriad/distributions.hpp"
#include "myriad/error.hpp"
#include "myriad/imaging.hpp"
#include "support.hpp"

using namespace myriad;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
// Computed with an independent separable-filter implementation.
constexpr double kSsimGolden = 0.7568851562283672;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "myriad_test_imaging";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no myriad::Error thrown");
  return Errc::InvalidArgument;
}

Image wave(std::size_t side) {
  Image img(side, side);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) img.set(r, c, 128.0 + 100.0 * std::sin(r / 5.0) * std::cos(c / 7.0));
  return img;
}

Image perturbed_wave(std::size_t side) {
  Image img = wave(side);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c)
      img.set(r, c, img(r, c) + 20.0 * (static_cast<double>((r * 31 + c * 17) % 7) - 3.0) / 3.0);
  return img;
}

double ks_sorted(const std::vector<double>& v, auto cdf) {
  const auto n = static_cast<double>(v.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    worst = std::max({worst, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return worst;
}

}  // namespace

TEST_CASE("image containers") {
  Image img(3, 2, 7.0);
  CHECK(img.width() == 3);
  CHECK(img.height() == 2);
  CHECK(img(1, 2) == 7.0);
  img.set(1, 2, -4.5);
  CHECK(img.pixels()[5] == -4.5);
  CHECK_THROWS_AS(img.set(0, 0, std::numeric_limits<double>::quiet_NaN()), Error);
  CHECK_THROWS_AS(Image(0, 3), Error);
  CHECK(code_of([] { Image(2, 2, std::vector<double>{1.0, 2.0, 3.0}); }) == Errc::ShapeMismatch);

  S1Image s(2, 2);
  s.set(0, 1, kPi);
  CHECK(s(0, 1) == -kPi);
  s.set(1, 1, 7.0);
  CHECK(s(1, 1) == Approx(7.0 - 2.0 * kPi));
}

TEST_CASE("student t noise") {
  const Image flat(1000, 1000, 0.0);
  SUBCASE("vanishing sigma leaves the image") {
    const Image u = wave(32);
    const Image f = add_student_t_noise(u, 1.0, 1e-300, 3);
    CHECK(std::equal(u.pixels().begin(), u.pixels().end(), f.pixels().begin()));
  }
  SUBCASE("cauchy median and marginal") {
    const Image f = add_student_t_noise(flat, 1.0, 10.0, 4);
    std::vector<double> v(f.pixels().begin(), f.pixels().end());
    std::sort(v.begin(), v.end());
    CHECK(std::abs(0.5 * (v[499999] + v[500000])) <= 0.1);
    CHECK(ks_sorted(v, [](double x) { return 0.5 + std::atan(x / 10.0) / kPi; }) <= 0.01);
  }
  SUBCASE("gaussian limit") {
    const Image f = add_student_t_noise(flat, 1e6, 10.0, 5);
    double s = 0.0, ss = 0.0;
    for (double x : f.pixels()) {
      s += x;
      ss += x * x;
    }
    const double n = static_cast<double>(f.size());
    CHECK(std::abs(std::sqrt(ss / n - (s / n) * (s / n)) - 10.0) <= 0.1);
  }
  SUBCASE("not clipped, seeded, validated") {
    const Image f = add_student_t_noise(Image(64, 64, 128.0), 1.0, 10.0, 6);
    const auto [lo, hi] = std::minmax_element(f.pixels().begin(), f.pixels().end());
    CHECK(*lo < 0.0);
    CHECK(*hi > 255.0);
    const Image c = clip(f);
    for (double x : c.pixels()) CHECK((x >= 0.0 && x <= 255.0));
    const Image g = add_student_t_noise(Image(64, 64, 128.0), 1.0, 10.0, 6);
    CHECK(std::equal(f.pixels().begin(), f.pixels().end(), g.pixels().begin()));
    CHECK(code_of([&] { add_student_t_noise(flat, 0.5, 10.0, 1); }) == Errc::InvalidNu);
  }
}

TEST_CASE("wrapped cauchy noise") {
  const S1Image zero(1000, 1000, 0.0);
  const S1Image f = add_wrapped_cauchy_noise(zero, 0.1, 8);
  std::vector<double> v(f.angles().begin(), f.angles().end());
  for (double t : v) {
    if (!(t >= -kPi && t < kPi)) {
      FAIL("angle out of range");
      break;
    }
  }
  std::sort(v.begin(), v.end());
  const double rho = std::exp(-0.1);
  CHECK(ks_sorted(v, [rho](double t) {
          return 0.5 + std::atan((1.0 + rho) / (1.0 - rho) * std::tan(t / 2.0)) / kPi;
        }) <= 0.01);
  const S1Image g = add_wrapped_cauchy_noise(zero, 0.1, 8);
  CHECK(std::equal(f.angles().begin(), f.angles().end(), g.angles().begin()));
  CHECK_THROWS_AS(add_wrapped_cauchy_noise(zero, 0.0, 1), Error);
}

TEST_CASE("psnr") {
  const Image ref = wave(16);
  CHECK(std::isinf(psnr(ref, ref)));
  std::vector<double> shifted(ref.pixels().begin(), ref.pixels().end());
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += (i % 2 ? 10.0 : -10.0);
  const Image t(16, 16, shifted);
  CHECK(psnr(ref, t) == Approx(20.0 * std::log10(25.5)).epsilon(1e-12));
  CHECK(psnr(ref, t) == psnr(t, ref));
  double last = std::numeric_limits<double>::infinity();
  for (double c : {0.5, 3.0, 40.0}) {
    std::vector<double> px(ref.pixels().begin(), ref.pixels().end());
    for (double& x : px) x += c;
    const double p = psnr(ref, Image(16, 16, px));
    CHECK(p == Approx(10.0 * std::log10(255.0 * 255.0 / (c * c))).epsilon(1e-12));
    CHECK(p < last);
    last = p;
  }
  CHECK(code_of([&] { psnr(ref, Image(16, 15)); }) == Errc::ShapeMismatch);
}

TEST_CASE("ssim") {
  const Image ref = wave(64);
  CHECK(ssim(ref, ref) == Approx(1.0).epsilon(1e-12));
  double mean = 0.0;
  for (double x : ref.pixels()) mean += x / ref.size();
  const double flat = ssim(ref, Image(64, 64, mean));
  CHECK(flat > 0.0);
  CHECK(flat < 1.0);
  // Frozen once from this implementation.
  CHECK(ssim(ref, perturbed_wave(64)) == Approx(kSsimGolden).epsilon(1e-9));
  CHECK(code_of([] { ssim(Image(10, 40), Image(10, 40)); }) == Errc::TooSmall);
}

TEST_CASE("circular error") {
  CHECK(s1_distance(kPi - 0.1, -kPi + 0.1) == Approx(0.2));
  CHECK(s1_distance(0.3, 0.3) == 0.0);
  const S1Image a(1, 1, 0.5);
  const S1Image b(1, 1, 0.5 - kPi);
  CHECK(s1_mse(a, a) == 0.0);
  CHECK(s1_mse(a, b) == Approx(kPi * kPi).epsilon(1e-14));

  testing::Gen g(51);
  std::vector<double> x(64), y(64);
  for (std::size_t i = 0; i < 64; ++i) {
    x[i] = g.uniform(-kPi, kPi);
    y[i] = g.uniform(-kPi, kPi);
  }
  const double base = s1_mse(S1Image(8, 8, x), S1Image(8, 8, y));
  for (double c : {0.7, -2.9, 3.1}) {
    std::vector<double> xr(x), yr(y);
    for (std::size_t i = 0; i < 64; ++i) {
      xr[i] = wrap_angle(xr[i] + c);
      yr[i] = wrap_angle(yr[i] + c);
    }
    CHECK(s1_mse(S1Image(8, 8, xr), S1Image(8, 8, yr)) == Approx(base).epsilon(1e-12));
  }
  CHECK(code_of([] { s1_mse(S1Image(2, 2), S1Image(4, 1)); }) == Errc::ShapeMismatch);
}

TEST_CASE("pgm round trips") {
  testing::Gen g(52);
  std::vector<double> px(37 * 23);
  for (double& v : px) v = static_cast<double>(g.index(256));
  const Image img(37, 23, px);
  const fs::path p = scratch("rt8.pgm");
  const PgmWriteReport rep = write_pgm(p, img);
  CHECK(rep.clamped_low == 0);
  CHECK(rep.clamped_high == 0);
  const Image back = read_pgm(p);
  CHECK(back.width() == 37);
  CHECK(back.height() == 23);
  CHECK(back.peak() == 255.0);
  CHECK(std::equal(px.begin(), px.end(), back.pixels().begin()));

  for (double& v : px) v = static_cast<double>(g.index(65536));
  const fs::path q = scratch("rt16.pgm");
  write_pgm(q, Image(37, 23, px, 65535.0));
  const Image wide = read_pgm(q);
  CHECK(wide.peak() == 65535.0);
  CHECK(std::equal(px.begin(), px.end(), wide.pixels().begin()));
}

TEST_CASE("pgm clamps and rounds half to even") {
  const Image img(5, 1, std::vector<double>{-3.0, 2.5, 3.5, 254.5, 300.0});
  const fs::path p = scratch("clamp.pgm");
  const PgmWriteReport rep = write_pgm(p, img);
  CHECK(rep.clamped_low == 1);
  CHECK(rep.clamped_high == 1);
  const Image back = read_pgm(p);
  CHECK(back(0, 0) == 0.0);
  CHECK(back(0, 1) == 2.0);
  CHECK(back(0, 2) == 4.0);
  CHECK(back(0, 3) == 254.0);
  CHECK(back(0, 4) == 255.0);
}

TEST_CASE("pgm parsing") {
  SUBCASE("big-endian 16-bit fixture") {
    const fs::path p = scratch("fixture16.pgm");
    write_bytes(p, std::string("P5\n# fixture\n2 2\n65535\n") + std::string("\x01\x02\xff\xfe\x00\x00\x80\x00", 8));
    const Image img = read_pgm(p);
    CHECK(img(0, 0) == 258.0);
    CHECK(img(0, 1) == 65534.0);
    CHECK(img(1, 0) == 0.0);
    CHECK(img(1, 1) == 32768.0);
  }
  SUBCASE("truncated payload") {
    const fs::path p = scratch("short.pgm");
    write_bytes(p, "P5\n4 4\n255\n0123456");
    CHECK(code_of([&] { read_pgm(p); }) == Errc::MalformedHeader);
  }
  SUBCASE("missing file") {
    CHECK(code_of([] { read_pgm(scratch("does_not_exist.pgm")); }) == Errc::IoFailure);
  }
  SUBCASE("fuzzed headers give structured errors") {
    testing::Gen g(53);
    const std::string good = std::string("P5\n3 2\n255\n") + std::string(6, 'x');
    const fs::path p = scratch("fuzz.pgm");
    int structured = 0, accepted = 0;
    for (int trial = 0; trial < 2000; ++trial) {
      std::string b = good;
      const std::size_t edits = 1 + g.index(4);
      for (std::size_t e = 0; e < edits; ++e) {
        const std::size_t at = g.index(b.size());
        switch (g.index(3)) {
          case 0: b[at] = static_cast<char>(g.index(256)); break;
          case 1: b.erase(at, 1 + g.index(3)); break;
          default: b.insert(at, 1, static_cast<char>(g.index(256)));
        }
      }
      if (trial % 10 == 0) b.resize(g.index(b.size() + 1));
      write_bytes(p, b);
      try {
        read_pgm(p);
        ++accepted;
      } catch (const Error&) {
        ++structured;
      }
    }
    CHECK(structured + accepted == 2000);
    CHECK(structured > 0);
  }
}

TEST_CASE("raw float rasters") {
  testing::Gen g(54);
  std::vector<double> px(19 * 7);
  for (double& v : px) v = g.normal() * 1e3;
  const fs::path p = scratch("rt.myr");
  write_f64(p, Image(19, 7, px));
  CHECK(peek_f64_kind(p) == RasterKind::real);
  const Image back = read_f64_image(p);
  CHECK(std::equal(px.begin(), px.end(), back.pixels().begin()));

  const std::string bytes = read_bytes(p);
  REQUIRE(bytes.size() == 24 + 8 * px.size());
  CHECK(bytes.substr(0, 4) == "MYR1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 19);
  CHECK(static_cast<unsigned char>(bytes[8]) == 7);
  CHECK(static_cast<unsigned char>(bytes[12]) == 0);

  std::vector<double> ang(19 * 7);
  for (double& v : ang) v = g.uniform(-kPi, kPi);
  const fs::path q = scratch("rt_s1.myr");
  write_f64(q, S1Image(19, 7, ang));
  CHECK(peek_f64_kind(q) == RasterKind::circular);
  const S1Image sback = read_f64_s1(q);
  CHECK(std::equal(ang.begin(), ang.end(), sback.angles().begin()));

  CHECK(code_of([&] { read_f64_s1(p); }) == Errc::KindMismatch);
  CHECK(code_of([&] { read_f64_image(q); }) == Errc::KindMismatch);

  SUBCASE("non-finite payload is located") {
    std::string b = bytes;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::memcpy(b.data() + 24 + 8 * (2 * 19 + 5), &nan, 8);
    const fs::path r = scratch("nan.myr");
    write_bytes(r, b);
    try {
      read_f64_image(r);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MalformedHeader);
      CHECK(std::string(e.what()).find("row 2, column 5") != std::string::npos);
    }
  }
  SUBCASE("fuzzed headers give structured errors") {
    const fs::path r = scratch("fuzz.myr");
    for (int trial = 0; trial < 1000; ++trial) {
      std::string b = bytes.substr(0, 24 + 8 * static_cast<std::size_t>(g.index(px.size() + 2)));
      for (std::size_t e = 0; e < 3; ++e) b[g.index(24)] = static_cast<char>(g.index(256));
      write_bytes(r, b);
      try {
        read_f64_image(r);
      } catch (const Error&) {
      }
    }
    CHECK(true);
  }
}

TEST_CASE("phantoms") {
  const Image u = make_piecewise_phantom();
  CHECK(u.width() == 128);
  CHECK(u.height() == 128);
  for (double x : u.pixels()) CHECK((x >= 0.0 && x <= 255.0));
  std::vector<double> levels(u.pixels().begin(), u.pixels().end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  CHECK(levels.size() >= 4);

  const S1Image s = make_s1_phantom(64);
  bool near_plus = false, near_minus = false;
  for (double a : s.angles()) {
    near_plus = near_plus || a > 2.8;
    near_minus = near_minus || a < -2.8;
  }
  CHECK(near_plus);
  CHECK(near_minus);
}

TEST_CASE("shipped phantoms match the generators") {
  const Image u = read_pgm(MYRIAD_DATA_DIR "/phantom_128.pgm");
  const Image g = make_piecewise_phantom(128);
  CHECK(std::equal(u.pixels().begin(), u.pixels().end(), g.pixels().begin(), g.pixels().end()));
  const S1Image s = read_f64_s1(MYRIAD_DATA_DIR "/s1_phantom_256.myr");
  const S1Image t = make_s1_phantom(256);
  CHECK(std::equal(s.angles().begin(), s.angles().end(), t.angles().begin(), t.angles().end()));
}
