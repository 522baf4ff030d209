#include <doctest.h>

#include <cmath>
#include <numbers>

#include "brcf/features.hpp"
#include "helpers.hpp"

using namespace brcf;

namespace {

Frame crop(const Frame& f, int x0, int y0, int w, int h) {
  Frame out(w, h, f.channels());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < f.channels(); ++c) out.at(x, y, c) = f.at(x0 + x, y0 + y, c);
  return out;
}

double cell_sum(const FeatureMap& m, int r, int c) {
  double s = 0.0;
  for (int k = 0; k < m.channels; ++k) s += m.at(k, r, c);
  return s;
}

}  // namespace

TEST_CASE("hog dimensions") {
  const FeatureMap m = hog(test::random_frame(40, 40, 1, 1), 4);
  CHECK(m.rows == 10);
  CHECK(m.cols == 10);
  CHECK(m.channels == 31);
  const FeatureMap odd = hog(test::random_frame(43, 21, 3, 1), 4);
  CHECK(odd.rows == 5);
  CHECK(odd.cols == 10);
  CHECK_THROWS(hog(Frame(3, 3, 1), 4));
}

TEST_CASE("hog of a constant patch has no orientation energy") {
  Frame f(32, 32, 1);
  for (auto& v : f.data()) v = 77;
  const FeatureMap m = hog(f, 4);
  for (int k = 0; k < 27; ++k)
    for (int r = 0; r < m.rows; ++r)
      for (int c = 0; c < m.cols; ++c) REQUIRE(std::abs(m.at(k, r, c)) < 1e-6);
}

TEST_CASE("hog step edge lands in the gradient-direction bin") {
  // Bright right half: the gradient points along +x.
  Frame f(32, 32, 1);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) f.at(x, y) = x < 16 ? 40 : 200;
  const FeatureMap m = hog(f, 4);

  // Direct binning of each pixel's central-difference gradient into 18 signed bins.
  std::array<double, 18> oracle{};
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) {
      const double dx = f.clamped(x + 1, y) - f.clamped(x - 1, y);
      const double dy = f.clamped(x, y + 1) - f.clamped(x, y - 1);
      const double mag = std::hypot(dx, dy);
      if (mag == 0.0) continue;
      double a = std::atan2(dy, dx);
      if (a < 0) a += 2 * std::numbers::pi;
      oracle[static_cast<int>(std::lround(a / (std::numbers::pi / 9))) % 18] += mag;
    }
  const int expected = static_cast<int>(std::max_element(oracle.begin(), oracle.end()) - oracle.begin());
  CHECK(expected == 0);

  std::array<double, 18> mass{};
  for (int k = 0; k < 18; ++k)
    for (int r = 0; r < m.rows; ++r)
      for (int c = 0; c < m.cols; ++c) mass[k] += m.at(k, r, c);
  CHECK(std::max_element(mass.begin(), mass.end()) - mass.begin() == expected);
}

TEST_CASE("hog values are finite and bounded") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const FeatureMap m = hog(test::random_frame(24, 28, seed % 2 ? 3 : 1, seed), 4);
    for (int k = 0; k < m.channels; ++k) {
      // Orientation channels average four truncated blocks; texture channels sum 18 of them.
      const double bound = k < 27 ? 0.4 : 0.2357 * 18 * 0.2;
      for (double v : m.plane(k)) {
        REQUIRE(std::isfinite(v));
        REQUIRE(v >= 0.0);
        REQUIRE(v <= bound + 1e-12);
      }
    }
  }
}

TEST_CASE("color histogram") {
  Frame solid(8, 8, 3);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      solid.at(x, y, 0) = 250;
      solid.at(x, y, 1) = 10;
      solid.at(x, y, 2) = 130;
    }
  const FeatureMap m = color_hist(solid, 4, 4);
  CHECK(m.channels == 64);
  const int bin = (3 * 4 + 0) * 4 + 2;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      CHECK(m.at(bin, r, c) == 1.0);
      CHECK(cell_sum(m, r, c) == doctest::Approx(1.0).epsilon(1e-12));
    }

  Frame checker(4, 4, 3);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      for (int c = 0; c < 3; ++c) checker.at(x, y, c) = (x + y) % 2 ? 255 : 0;
  const FeatureMap cm = color_hist(checker, 4, 4);
  CHECK(cm.at(0, 0, 0) == 0.5);
  CHECK(cm.at(63, 0, 0) == 0.5);

  const FeatureMap rnd = color_hist(test::random_frame(36, 20, 3, 4), 4, 4);
  for (int r = 0; r < rnd.rows; ++r)
    for (int c = 0; c < rnd.cols; ++c) REQUIRE(std::abs(cell_sum(rnd, r, c) - 1.0) < 1e-9);

  CHECK_THROWS(color_hist(Frame(8, 8, 1), 4, 4));
}

TEST_CASE("uniform lbp bins") {
  int uniform = 0;
  for (int code = 0; code < 256; ++code)
    if (lbp_uniform_bin(code) < 58) ++uniform;
  CHECK(uniform == 58);
  CHECK(lbp_uniform_bin(0) != lbp_uniform_bin(255));
  CHECK(lbp_uniform_bin(0b01010101) == 58);
}

TEST_CASE("lbp histogram") {
  Frame flat(40, 40, 1);
  for (auto& v : flat.data()) v = 90;
  const FeatureMap m = lbp_hist(flat, 4);
  CHECK(m.rows == 10);
  CHECK(m.cols == 10);
  CHECK(m.channels == 59);
  const int all_ones = lbp_uniform_bin(255);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) REQUIRE(m.at(all_ones, r, c) == doctest::Approx(1.0));

  // Direct neighbour comparison for one interior pixel of a random patch, cell size 1.
  const Frame rnd = test::random_frame(6, 6, 1, 8);
  const FeatureMap one = lbp_hist(rnd, 1);
  const int dx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
  const int dy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
  int code = 0;
  for (int k = 0; k < 8; ++k)
    if (rnd.at(2 + dx[k], 3 + dy[k]) >= rnd.at(2, 3)) code |= 1 << k;
  CHECK(one.at(lbp_uniform_bin(code), 3, 2) == 1.0);

  const FeatureMap big = lbp_hist(test::random_frame(30, 26, 1, 3), 4);
  for (int r = 0; r < big.rows; ++r)
    for (int c = 0; c < big.cols; ++c) REQUIRE(std::abs(cell_sum(big, r, c) - 1.0) < 1e-9);

  CHECK_THROWS(lbp_hist(Frame(2, 2, 1), 1));
  CHECK_THROWS(lbp_hist(Frame(8, 8, 3), 4));
}

TEST_CASE("features shift by one cell with the content") {
  const Frame rgb = to_rgb(test::smooth_texture(64, 48, 21));
  const int cell = 4;
  const Frame a = crop(rgb, 8, 8, 40, 32);
  const Frame b = crop(rgb, 8 + cell, 8, 40, 32);

  auto compare = [&](const FeatureMap& fa, const FeatureMap& fb, int margin) {
    for (int k = 0; k < fa.channels; ++k)
      for (int r = margin; r < fa.rows - margin; ++r)
        for (int c = margin; c + 1 < fa.cols - margin; ++c)
          REQUIRE(std::abs(fb.at(k, r, c) - fa.at(k, r, c + 1)) < 1e-12);
  };
  compare(hog(a, cell), hog(b, cell), 2);
  compare(color_hist(a, cell, 4), color_hist(b, cell, 4), 0);
  compare(lbp_hist(to_grayscale(a), cell), lbp_hist(to_grayscale(b), cell), 1);
}

TEST_CASE("hann window") {
  const auto w = hann_window(5, 7);
  CHECK(w[0] == 0.0);
  CHECK(w[2 * 7 + 3] == doctest::Approx(1.0));
  FeatureMap m(5, 7, 2);
  for (auto& v : m.values) v = 2.0;
  apply_hann_window(m);
  CHECK(m.at(1, 2, 3) == doctest::Approx(2.0));
  CHECK(m.at(0, 0, 3) == 0.0);
}
