#pragma once

// gaussian joint spectral amplitudes: closed-form overlaps, gridding and
// Schmidt analysis

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "kerrgate/numerics.hpp"

namespace kerrgate {

// f(nu_p, nu_s) = scale * exp(-(c1p nu_p^2 + c1s nu_s^2 + c2p nu_p
//                              + c2s nu_s + c3 nu_p nu_s + c4))
struct GaussianTwoPhotonAmplitude {
  std::complex<double> scale{1.0, 0.0};
  std::complex<double> c1p{0.0, 0.0};
  std::complex<double> c1s{0.0, 0.0};
  std::complex<double> c2p{0.0, 0.0};
  std::complex<double> c2s{0.0, 0.0};
  std::complex<double> c3{0.0, 0.0};
  std::complex<double> c4{0.0, 0.0};
};

inline bool is_square_integrable(const GaussianTwoPhotonAmplitude& f) {
  double a1 = f.c1p.real(), a2 = f.c1s.real(), c = f.c3.real();
  return a1 > 0.0 && a2 > 0.0 && 4.0 * a1 * a2 > c * c;
}

inline std::complex<double> evaluate(const GaussianTwoPhotonAmplitude& f, double nu_p,
                                     double nu_s) {
  return f.scale * std::exp(-(f.c1p * (nu_p * nu_p) + f.c1s * (nu_s * nu_s) +
                              f.c2p * nu_p + f.c2s * nu_s + f.c3 * (nu_p * nu_s) + f.c4));
}

// unit-norm product of two sigma-wide marginals
inline GaussianTwoPhotonAmplitude input_state(double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("input_state: sigma must be positive");
  GaussianTwoPhotonAmplitude f;
  f.scale = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  f.c1p = f.c1s = 1.0 / (4.0 * sigma * sigma);
  return f;
}

// <a|b> by the closed form for a full-plane gaussian integral
inline std::complex<double> analytic_overlap(const GaussianTwoPhotonAmplitude& a,
                                             const GaussianTwoPhotonAmplitude& b) {
  using C = std::complex<double>;
  C a1 = std::conj(a.c1p) + b.c1p;
  C a2 = std::conj(a.c1s) + b.c1s;
  C c = std::conj(a.c3) + b.c3;
  C b1 = std::conj(a.c2p) + b.c2p;
  C b2 = std::conj(a.c2s) + b.c2s;
  C d = std::conj(a.c4) + b.c4;
  if (!(a1.real() > 0.0 && a2.real() > 0.0 &&
        4.0 * a1.real() * a2.real() > c.real() * c.real()))
    throw std::domain_error("analytic_overlap: combined amplitude is not integrable");
  C det = 4.0 * a1 * a2 - c * c;
  C expo = (a2 * b1 * b1 - c * b1 * b2 + a1 * b2 * b2) / det - d;
  return std::conj(a.scale) * b.scale * (2.0 * std::numbers::pi / std::sqrt(det)) *
         std::exp(expo);
}

struct GriddedAmplitude {
  FrequencyGrid grid;
  std::vector<std::complex<double>> values;  // row-major, nu_p outer

  std::complex<double>& at(int ip, int is) { return values[size_t(ip) * grid.points_per_axis + is]; }
  const std::complex<double>& at(int ip, int is) const {
    return values[size_t(ip) * grid.points_per_axis + is];
  }
};

namespace detail {

// largest |value| on the outermost ring vs overall; used to reject grids
// that clip the state
inline std::pair<double, double> edge_and_peak(const GriddedAmplitude& g) {
  int n = g.grid.points_per_axis;
  double peak = 0.0, edge = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double m = std::abs(g.at(i, j));
      peak = std::max(peak, m);
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1) edge = std::max(edge, m);
    }
  return {edge, peak};
}

}  // namespace detail

inline GriddedAmplitude to_grid(const GaussianTwoPhotonAmplitude& f, const FrequencyGrid& grid) {
  GriddedAmplitude out{grid, {}};
  int n = grid.points_per_axis;
  out.values.resize(size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::complex<double> v = evaluate(f, grid.points[i], grid.points[j]);
      if (!detail::finite_parts(v))
        throw std::runtime_error("to_grid: non-finite amplitude at nu_p=" +
                                 std::to_string(grid.points[i]) + ", nu_s=" +
                                 std::to_string(grid.points[j]));
      out.at(i, j) = v;
    }
  auto [edge, peak] = detail::edge_and_peak(out);
  if (peak == 0.0 || edge >= 1e-6 * peak)
    throw std::domain_error("to_grid: grid too small, edge/peak ratio " +
                            std::to_string(peak == 0.0 ? 1.0 : edge / peak));
  return out;
}

// trapezoid <a|b> for sampled amplitudes on one layout
inline std::complex<double> grid_overlap(const GriddedAmplitude& a, const GriddedAmplitude& b) {
  if (!a.grid.same_layout(b.grid))
    throw std::domain_error("grid_overlap: mismatched grids");
  int n = a.grid.points_per_axis;
  std::complex<double> acc = 0.0;
  for (int i = 0; i < n; ++i) {
    std::complex<double> row = 0.0;
    for (int j = 0; j < n; ++j) row += a.grid.weights[j] * (std::conj(a.at(i, j)) * b.at(i, j));
    acc += a.grid.weights[i] * row;
  }
  return acc;
}

struct SchmidtSpectrum {
  std::vector<double> lambdas;  // descending, truncated at k_max
  double purity = 0.0;          // sum of squares over the full spectrum
  double entropy = 0.0;         // -sum lambda log2 lambda, full spectrum
};

// Schmidt coefficients via SVD of the weight-symmetrized kernel
// sqrt(w_i) V(i,j) sqrt(w_j)
inline SchmidtSpectrum schmidt(const GriddedAmplitude& g, int k_max = 1 << 20) {
  if (k_max < 1) throw std::domain_error("schmidt: k_max must be >= 1");
  int n = g.grid.points_per_axis;
  Eigen::MatrixXcd A(n, n);
  std::vector<double> sw(n);
  for (int i = 0; i < n; ++i) sw[i] = std::sqrt(g.grid.weights[i]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = sw[i] * sw[j] * g.at(i, j);

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
  const auto& s = svd.singularValues();
  double total = 0.0;
  for (int k = 0; k < s.size(); ++k) total += s[k] * s[k];
  if (!(total > 0.0)) throw std::domain_error("schmidt: amplitude has zero norm");

  SchmidtSpectrum out;
  for (int k = 0; k < s.size(); ++k) {
    double lam = s[k] * s[k] / total;
    out.purity += lam * lam;
    if (lam > 0.0) out.entropy -= lam * std::log2(lam);
    if (k < k_max) out.lambdas.push_back(lam);
  }
  return out;
}

// rows of (nu_p, nu_s, re, im), 12 significant digits
inline void write_csv(const GriddedAmplitude& g, std::ostream& os) {
  os << "nu_p,nu_s,re,im\n";
  int n = g.grid.points_per_axis;
  char buf[160];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& v = g.at(i, j);
      std::snprintf(buf, sizeof buf, "%.11e,%.11e,%.11e,%.11e\n", g.grid.points[i],
                    g.grid.points[j], v.real(), v.imag());
      os << buf;
    }
}

}  // namespace kerrgate
