#include "rfimg/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfimg::channel {
namespace {

constexpr double kDelayMergeTol = 1e-15; // s

} // namespace

std::vector<std::complex<double>> steering_vector_axis(const ArrayGeometry& g,
                                                       Axis axis,
                                                       const AnglePair& a) {
  const int m_count = axis == Axis::X ? g.m_x : g.m_y;
  const double spacing = axis == Axis::X ? g.d_x : g.d_y;
  const double u = axis == Axis::X
                       ? std::sin(a.zenith) * std::cos(a.azimuth)
                       : std::sin(a.zenith) * std::sin(a.azimuth);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_count));
  const double step = -kTwoPi / g.lambda * spacing * u;

  std::vector<std::complex<double>> v(static_cast<std::size_t>(m_count));
  for (int m = 0; m < m_count; ++m)
    v[static_cast<std::size_t>(m)] = std::polar(scale, step * m);
  return v;
}

std::vector<std::complex<double>> steering_vector_3d(const ArrayGeometry& g,
                                                     const AnglePair& a) {
  const auto ax = steering_vector_axis(g, Axis::X, a);
  const auto ay = steering_vector_axis(g, Axis::Y, a);
  std::vector<std::complex<double>> v;
  v.reserve(ax.size() * ay.size());
  for (const auto& ey : ay)
    for (const auto& ex : ax) v.push_back(ey * ex);
  return v;
}

std::vector<CirTap> synthesize_cir(const pathgen::Drop& drop,
                                   const ArrayGeometry& tx_geom,
                                   const ArrayGeometry& rx_geom) {
  if (drop.paths.empty())
    throw std::invalid_argument("synthesize_cir: drop has no paths");

  std::vector<const pathgen::PathComponent*> sorted;
  sorted.reserve(drop.paths.size());
  for (const auto& p : drop.paths) sorted.push_back(&p);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->toa_s < b->toa_s; });

  const int rows = rx_geom.size();
  const int cols = tx_geom.size();

  std::vector<CirTap> taps;
  for (const pathgen::PathComponent* path : sorted) {
    if (taps.empty() ||
        path->toa_s - taps.back().delay_s > kDelayMergeTol) {
      CirTap tap;
      tap.delay_s = path->toa_s;
      tap.rows = rows;
      tap.cols = cols;
      tap.matrix.assign(static_cast<std::size_t>(rows) * cols, {0.0, 0.0});
      taps.push_back(std::move(tap));
    }
    CirTap& tap = taps.back();
    const auto a_rx = steering_vector_3d(rx_geom, path->aoa);
    const auto a_tx = steering_vector_3d(tx_geom, path->aod);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        tap.at(r, c) += path->gain * a_rx[static_cast<std::size_t>(r)] *
                        a_tx[static_cast<std::size_t>(c)];
  }
  return taps;
}

} // namespace rfimg::channel
