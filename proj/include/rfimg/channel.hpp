#pragma once

#include <complex>
#include <vector>

#include "rfimg/geom.hpp"
#include "rfimg/pathgen.hpp"

namespace rfimg::channel {

// Uniform planar array in the world x/y plane: M_x x M_y elements with
// spacings d_x, d_y at wavelength lambda.
struct ArrayGeometry {
  int m_x = 1;
  int m_y = 1;
  double d_x = 0.0; // meters
  double d_y = 0.0;
  double lambda = 1.0;

  int size() const { return m_x * m_y; }
};

enum class Axis { X, Y };

// CIR tap: complex matrix of shape (RX elements x TX elements), row-major.
struct CirTap {
  double delay_s = 0.0;
  int rows = 0;
  int cols = 0;
  std::vector<std::complex<double>> matrix;

  std::complex<double>& at(int r, int c) { return matrix[r * cols + c]; }
  const std::complex<double>& at(int r, int c) const { return matrix[r * cols + c]; }
};

// Per-axis steering vector: entry m = exp(-j*2*pi/lambda*m*d*u)/sqrt(M) with
// u = sin(zenith)cos(azimuth) on x and sin(zenith)sin(azimuth) on y.
std::vector<std::complex<double>> steering_vector_axis(const ArrayGeometry& g,
                                                       Axis axis,
                                                       const AnglePair& a);

// Full array response: Kronecker product with the y-axis vector as the left
// factor, so element (m_y*M_x + m_x) = a_y[m_y]*a_x[m_x].
std::vector<std::complex<double>> steering_vector_3d(const ArrayGeometry& g,
                                                     const AnglePair& a);

// One tap per path delay: H = sum_j g_j * a_RX(aoa_j) * a_TX(aod_j)^T
// (transpose, not conjugate transpose). Taps whose delays differ by at most
// 1e-15 s are merged by summation; output is sorted by delay. Throws
// std::invalid_argument when the drop has no paths.
std::vector<CirTap> synthesize_cir(const pathgen::Drop& drop,
                                   const ArrayGeometry& tx_geom,
                                   const ArrayGeometry& rx_geom);

} // namespace rfimg::channel
