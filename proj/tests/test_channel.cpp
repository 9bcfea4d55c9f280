#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "rfimg/channel.hpp"

using namespace rfimg;
using channel::ArrayGeometry;
using channel::Axis;
using channel::CirTap;
using std::complex;

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double vec_norm(const std::vector<complex<double>>& v) {
  double n2 = 0.0;
  for (const auto& c : v) n2 += std::norm(c);
  return std::sqrt(n2);
}

// Largest singular value via power iteration on A^H A.
double max_singular_value(const CirTap& tap) {
  std::vector<complex<double>> x(tap.cols, {1.0, 0.25});
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<complex<double>> ax(tap.rows, 0.0);
    for (int r = 0; r < tap.rows; ++r)
      for (int c = 0; c < tap.cols; ++c) ax[r] += tap.at(r, c) * x[c];
    std::vector<complex<double>> ahax(tap.cols, 0.0);
    for (int c = 0; c < tap.cols; ++c)
      for (int r = 0; r < tap.rows; ++r)
        ahax[c] += std::conj(tap.at(r, c)) * ax[r];
    const double n = vec_norm(ahax);
    if (n == 0.0) return 0.0;
    for (auto& c : ahax) c /= n;
    x = std::move(ahax);
  }
  std::vector<complex<double>> ax(tap.rows, 0.0);
  for (int r = 0; r < tap.rows; ++r)
    for (int c = 0; c < tap.cols; ++c) ax[r] += tap.at(r, c) * x[c];
  return vec_norm(ax) / vec_norm(x);
}

double frobenius(const CirTap& tap) {
  double n2 = 0.0;
  for (const auto& c : tap.matrix) n2 += std::norm(c);
  return std::sqrt(n2);
}

pathgen::PathComponent make_path(const AnglePair& aod, const AnglePair& aoa,
                                 double toa, complex<double> gain) {
  pathgen::PathComponent p;
  p.aod = aod;
  p.aoa = aoa;
  p.toa_s = toa;
  p.gain = gain;
  p.bounce_count = 1;
  return p;
}

} // namespace

TEST_CASE("single-element steering vector is the unit scalar") {
  ArrayGeometry g{1, 1, 0.05, 0.05, 0.1};
  const auto v = channel::steering_vector_3d(g, {1.1, 0.7});
  REQUIRE(v.size() == 1);
  CHECK(std::abs(v[0] - complex<double>(1.0, 0.0)) < 1e-15);
}

TEST_CASE("two-element broadside/endfire responses") {
  // half-wavelength spacing on x, arrival along +x (zenith pi/2, azimuth 0):
  // u = 1, so the phase steps by pi per element -> (1, -1)/sqrt(2)
  ArrayGeometry g{2, 1, 0.5, 0.5, 1.0};
  const auto endfire = channel::steering_vector_axis(g, Axis::X, {0.0, kPi / 2});
  REQUIRE(endfire.size() == 2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(endfire[0] - complex<double>(inv_sqrt2, 0)) < 1e-12);
  CHECK(std::abs(endfire[1] - complex<double>(-inv_sqrt2, 0)) < 1e-12);

  // arrival along +y has u_x = 0: both elements in phase
  const auto broadside = channel::steering_vector_axis(g, Axis::X, {kPi / 2, kPi / 2});
  CHECK(std::abs(broadside[0] - broadside[1]) < 1e-12);

  // y-axis factor of the same geometry only sees u_y
  const auto y_end = channel::steering_vector_axis(
      ArrayGeometry{1, 2, 0.5, 0.5, 1.0}, Axis::Y, {kPi / 2, kPi / 2});
  REQUIRE(y_end.size() == 2);
  CHECK(std::abs(y_end[1] - complex<double>(-inv_sqrt2, 0)) < 1e-12);
}

TEST_CASE("steering vectors have unit norm") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 10000; ++i) {
    ArrayGeometry g;
    g.m_x = 1 + static_cast<int>(uniform01(rng) * 8.0);
    g.m_y = 1 + static_cast<int>(uniform01(rng) * 8.0);
    g.lambda = 0.01 + uniform01(rng);
    g.d_x = (0.05 + uniform01(rng)) * g.lambda;
    g.d_y = (0.05 + uniform01(rng)) * g.lambda;
    const AnglePair a{kTwoPi * uniform01(rng), kPi * uniform01(rng)};
    CHECK(std::abs(vec_norm(channel::steering_vector_3d(g, a)) - 1.0) < 1e-12);
  }
}

TEST_CASE("planar response is the Kronecker product of the axis factors") {
  ArrayGeometry g{2, 3, 0.021, 0.017, 0.0444};
  const AnglePair a{0.8, 1.1};
  const auto ax = channel::steering_vector_axis(g, Axis::X, a);
  const auto ay = channel::steering_vector_axis(g, Axis::Y, a);
  const auto full = channel::steering_vector_3d(g, a);
  REQUIRE(full.size() == 6);
  for (int my = 0; my < 3; ++my)
    for (int mx = 0; mx < 2; ++mx)
      CHECK(std::abs(full[my * 2 + mx] - ay[my] * ax[mx]) < 1e-15);
}

TEST_CASE("single 1x1 path gives a rank-one unit tap") {
  pathgen::Drop drop;
  drop.paths.push_back(make_path({0.2, 1.0}, {1.3, 0.4}, 5e-9, {1.0, 0.0}));
  ArrayGeometry one{1, 1, 0.0, 0.0, 0.0444};
  const auto taps = channel::synthesize_cir(drop, one, one);
  REQUIRE(taps.size() == 1);
  CHECK(taps[0].delay_s == 5e-9);
  REQUIRE(taps[0].rows == 1);
  REQUIRE(taps[0].cols == 1);
  CHECK(std::abs(taps[0].at(0, 0) - complex<double>(1.0, 0.0)) < 1e-15);
}

TEST_CASE("single-path taps are rank one with singular value |g|") {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 50; ++i) {
    ArrayGeometry tx_g{2, 2, 0.02, 0.02, 0.0444};
    ArrayGeometry rx_g{2, 1, 0.025, 0.025, 0.0444};
    const complex<double> gain =
        std::polar(1e-6 + uniform01(rng), kTwoPi * uniform01(rng));
    pathgen::Drop drop;
    drop.paths.push_back(make_path({kTwoPi * uniform01(rng), kPi * uniform01(rng)},
                                   {kTwoPi * uniform01(rng), kPi * uniform01(rng)},
                                   1e-9, gain));
    const auto taps = channel::synthesize_cir(drop, tx_g, rx_g);
    REQUIRE(taps.size() == 1);
    const CirTap& tap = taps[0];
    CHECK(tap.rows == 2);
    CHECK(tap.cols == 4);

    // rank one: every 2x2 minor vanishes
    for (int c = 1; c < tap.cols; ++c)
      CHECK(std::abs(tap.at(0, 0) * tap.at(1, c) - tap.at(1, 0) * tap.at(0, c)) <
            1e-12);
    // for a rank-one matrix the Frobenius norm equals the top singular value
    CHECK(frobenius(tap) == doctest::Approx(std::abs(gain)).epsilon(1e-9));
    CHECK(max_singular_value(tap) == doctest::Approx(std::abs(gain)).epsilon(1e-9));
  }
}

TEST_CASE("taps sort by delay and merge only within tolerance") {
  ArrayGeometry one{1, 1, 0.0, 0.0, 0.0444};
  pathgen::Drop drop;
  drop.paths.push_back(make_path({0, 1}, {0, 1}, 9e-9, {0.5, 0.0}));
  drop.paths.push_back(make_path({0, 1}, {0, 1}, 3e-9, {0.25, 0.0}));
  drop.paths.push_back(make_path({0, 1}, {0, 1}, 3e-9 + 5e-16, {0.25, 0.0}));

  const auto taps = channel::synthesize_cir(drop, one, one);
  REQUIRE(taps.size() == 2);
  CHECK(taps[0].delay_s == 3e-9);
  CHECK(taps[1].delay_s == 9e-9);
  CHECK(std::abs(taps[0].at(0, 0) - complex<double>(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(taps[1].at(0, 0) - complex<double>(0.5, 0.0)) < 1e-15);

  pathgen::Drop split;
  split.paths.push_back(make_path({0, 1}, {0, 1}, 3e-9, {0.25, 0.0}));
  split.paths.push_back(make_path({0, 1}, {0, 1}, 3e-9 + 1e-14, {0.25, 0.0}));
  CHECK(channel::synthesize_cir(split, one, one).size() == 2);
}

TEST_CASE("superposition: the CIR is linear in the path gains") {
  ArrayGeometry tx_g{2, 1, 0.02, 0.02, 0.0444};
  ArrayGeometry rx_g{2, 1, 0.02, 0.02, 0.0444};
  const auto p1 = make_path({0.3, 1.2}, {2.0, 0.9}, 4e-9, {1.0, -0.5});
  const auto p2 = make_path({1.3, 0.6}, {4.0, 1.9}, 4e-9, {-0.25, 0.75});

  pathgen::Drop both;
  both.paths = {p1, p2};
  pathgen::Drop first;
  first.paths = {p1};
  pathgen::Drop second;
  second.paths = {p2};

  const auto t_both = channel::synthesize_cir(both, tx_g, rx_g);
  const auto t1 = channel::synthesize_cir(first, tx_g, rx_g);
  const auto t2 = channel::synthesize_cir(second, tx_g, rx_g);
  REQUIRE(t_both.size() == 1);
  for (std::size_t i = 0; i < t_both[0].matrix.size(); ++i)
    CHECK(std::abs(t_both[0].matrix[i] - (t1[0].matrix[i] + t2[0].matrix[i])) <
          1e-15);

  pathgen::Drop scaled = first;
  scaled.paths[0].gain *= 3.0;
  const auto t3 = channel::synthesize_cir(scaled, tx_g, rx_g);
  for (std::size_t i = 0; i < t3[0].matrix.size(); ++i)
    CHECK(std::abs(t3[0].matrix[i] - 3.0 * t1[0].matrix[i]) < 1e-15);
}

TEST_CASE("empty drop is rejected") {
  pathgen::Drop drop;
  ArrayGeometry one{1, 1, 0.0, 0.0, 0.0444};
  CHECK_THROWS_AS(channel::synthesize_cir(drop, one, one), std::invalid_argument);
}
