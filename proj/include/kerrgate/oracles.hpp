#pragma once

// independent cross-checks: discretized interaction generators with their
// commutator norm, and a stratified Monte Carlo comparison of the second
// Dyson and Taylor terms

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "kerrgate/numerics.hpp"

namespace kerrgate {

// interaction kernel entering the two-photon generator
struct KernelKind {
  enum class Variant { gaussian_filter, dispersion, combined };
  Variant variant = Variant::gaussian_filter;
  double M = 1.0;        // filter bandwidth
  double L = 0.0;        // medium length
  double kp = 0.0;       // inverse group velocity, pump side
  double ks = 0.0;       // inverse group velocity, signal side

  static KernelKind gaussian_filter(double M) {
    if (!(M > 0.0)) throw std::domain_error("KernelKind: M must be positive");
    return {Variant::gaussian_filter, M, 0.0, 0.0, 0.0};
  }
  static KernelKind dispersion(double L, double kp, double ks) {
    if (!(L > 0.0)) throw std::domain_error("KernelKind: L must be positive");
    if (kp == ks) throw std::domain_error("KernelKind: kp and ks must differ");
    return {Variant::dispersion, 1.0, L, kp, ks};
  }
  static KernelKind combined(double M, double L, double kp, double ks) {
    if (!(M > 0.0)) throw std::domain_error("KernelKind: M must be positive");
    if (!(L > 0.0)) throw std::domain_error("KernelKind: L must be positive");
    if (kp == ks) throw std::domain_error("KernelKind: kp and ks must differ");
    return {Variant::combined, M, L, kp, ks};
  }
};

// product basis of one frequency grid per photon; index = ip * n + is
struct TwoPhotonBasis {
  FrequencyGrid grid;
  int dim() const { return grid.points_per_axis * grid.points_per_axis; }
};

namespace detail {

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace detail

// dense generator at time t; rows/columns over the two-photon product basis,
// weight-symmetrized so the matrix is Hermitian
inline Eigen::MatrixXcd hamiltonian_matrix(const KernelKind& kind, double t,
                                           const TwoPhotonBasis& basis, double coupling = 1.0) {
  int n = basis.grid.points_per_axis;
  if (n * n > 64 * 64)
    throw std::domain_error("hamiltonian_matrix: basis larger than 64^2 not supported");
  const auto& x = basis.grid.points;
  std::vector<double> sw(n);
  for (int i = 0; i < n; ++i) sw[i] = std::sqrt(basis.grid.weights[i]);

  bool with_filter = kind.variant != KernelKind::Variant::dispersion;
  bool with_disp = kind.variant != KernelKind::Variant::gaussian_filter;

  // per-pair pump/signal tables; only the sinc argument couples the two axes
  Eigen::MatrixXd gp(n, n), gs(n, n);
  Eigen::MatrixXcd php(n, n), phs(n, n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      double d = x[a] - x[c];
      if (with_filter) {
        double e = std::exp(-d * d / (4.0 * kind.M * kind.M));
        gp(a, c) = e;
        gs(a, c) = e;
      }
      std::complex<double> ph = std::exp(std::complex<double>(0.0, -d * t));
      php(a, c) = ph;
      phs(a, c) = ph;
    }

  Eigen::MatrixXcd H(n * n, n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double wrow = sw[a] * sw[b];
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double dp = x[a] - x[c], ds = x[b] - x[d];
          std::complex<double> k = 1.0;
          if (with_filter) k *= 0.5 * (gp(a, c) + gs(b, d));
          if (with_disp) {
            double dk = kind.kp * dp + kind.ks * ds;
            double arg = 0.5 * kind.L * dk;
            k *= detail::sinc(arg) * std::exp(std::complex<double>(0.0, arg));
          }
          H(a * n + b, c * n + d) =
              coupling * k * php(a, c) * phs(b, d) * (wrow * sw[c] * sw[d]);
        }
    }
  return H;
}

// ||[H(t1), H(t2)]||_F / (||H(t1)||_F ||H(t2)||_F)
inline double commutator_norm_ratio(const KernelKind& kind, double t1, double t2,
                                    const TwoPhotonBasis& basis, double coupling = 1.0) {
  Eigen::MatrixXcd h1 = hamiltonian_matrix(kind, t1, basis, coupling);
  Eigen::MatrixXcd h2 = hamiltonian_matrix(kind, t2, basis, coupling);
  double n1 = h1.norm(), n2 = h2.norm();
  if (!(n1 > 0.0 && n2 > 0.0))
    throw std::domain_error("commutator_norm_ratio: zero-norm generator");
  Eigen::MatrixXcd prod = h1 * h2;
  // h2*h1 is the adjoint of h1*h2 for Hermitian factors; one product suffices
  Eigen::MatrixXcd comm = prod - prod.adjoint().eval();
  return comm.norm() / (n1 * n2);
}

struct MonteCarloFidelity {
  double value = 0.0;
  double std_error = 0.0;
  long long samples_used = 0;
  bool unconverged = false;
};

// Second-order fidelity ratio |<T2|D2>|^2 / (<T2|T2><D2|D2>) estimated by
// stratified importance sampling in the two-photon time representation,
// where every contributing term reduces to a one- or two-dimensional
// gaussian integral. Student-t proposals with four degrees of freedom keep
// all weights bounded. The estimator is scale-free: sigma and M enter the
// batched means only through constants of the form K*s0^2.
inline MonteCarloFidelity dyson_taylor_second_order(double sigma, double M, long long samples,
                                                    std::uint64_t seed,
                                                    bool taylor_control = false) {
  if (!(sigma > 0.0)) throw std::domain_error("dyson check: sigma must be positive");
  if (!(M > 0.0)) throw std::domain_error("dyson check: M must be positive");
  if (samples < 10000)
    throw std::domain_error("dyson check: need at least 1e4 samples");

  // gaussian reductions: a2 from the input state, c4 from the filter pair
  const double a2 = 2.0 * sigma * sigma;
  const double c4 = 4.0 * M * M;
  const double K = a2 * (a2 + 2.0 * c4) / (a2 + c4);

  // t-proposal scales, 1.3 x the matched gaussian width
  const double s0 = 1.3 / std::sqrt(2.0 * K);
  const double su = 1.3 / std::sqrt(2.0 * a2);
  const double sv = 1.3 / std::sqrt(2.0 * (a2 + 2.0 * c4));

  // prefactor ratio of the one- and two-dimensional families; all the
  // dimensionful pieces cancel against the proposal scales
  const double rho = 2.0 * std::sqrt(std::numbers::pi / 2.0) / 1.3;

  const double ks0 = K * s0 * s0;             // = 1.3^2/2 up to rounding
  const double ku = a2 * su * su;
  const double kv = (a2 + 2.0 * c4) * sv * sv;

  auto t4_logpdf_unit = [](double z) {
    // student t, nu = 4, unit scale: 3/8 * (1 + z^2/4)^(-5/2)
    return std::log(3.0 / 8.0) - 2.5 * std::log1p(z * z / 4.0);
  };

  long long n = samples / 16;
  int batches = n < 16384 ? 64 : 256;
  long long per = n / batches;

  std::mt19937_64 eng(seed);
  std::student_t_distribution<double> t4(4.0);

  std::vector<double> bt(batches), bd(batches);
  double tt_sum = 0.0, dd_sum = 0.0;
  for (int b = 0; b < batches; ++b) {
    double m0 = 0.0, mp = 0.0, mph = 0.0;
    for (long long i = 0; i < per; ++i) {
      double z = t4(eng);
      double w = std::exp(-ks0 * z * z - t4_logpdf_unit(z));
      if (!std::isfinite(w))
        throw std::runtime_error("dyson check: non-finite weight at t=" +
                                 std::to_string(z * s0));
      m0 += w;
    }
    for (long long i = 0; i < per; ++i) {
      double zu = t4(eng);
      double zv = t4(eng);
      double w = std::exp(-ku * zu * zu - kv * zv * zv - t4_logpdf_unit(zu) -
                          t4_logpdf_unit(zv));
      if (!std::isfinite(w))
        throw std::runtime_error("dyson check: non-finite weight at u=" +
                                 std::to_string(zu * su) + ", v=" + std::to_string(zv * sv));
      mp += w;
      if (zv > 0.0) mph += w;
    }
    m0 /= double(per);
    mp /= double(per);
    mph /= double(per);
    // region multiplicities: 16 terms, time-ordered halves count 1/2 or 0
    double tt = 0.5 * rho * m0 + 3.5 * mp;
    double dd = taylor_control ? tt : 0.5 * rho * m0 + 2.5 * mp + 2.0 * mph;
    bt[b] = tt;
    bd[b] = dd;
    tt_sum += tt;
    dd_sum += dd;
  }

  double tt_mean = tt_sum / batches, dd_mean = dd_sum / batches;
  if (!(tt_mean > 0.0 && dd_mean > 0.0))
    throw std::runtime_error("dyson check: degenerate normalization estimate");

  MonteCarloFidelity out;
  // <T|D> = <T|T> pointwise in time, so the ratio collapses to TT/DD
  out.value = tt_mean / dd_mean;
  double var = 0.0;
  for (int b = 0; b < batches; ++b) {
    double fb = bt[b] / (bd[b] != 0.0 ? bd[b] : dd_mean);
    var += (fb - out.value) * (fb - out.value);
  }
  var /= double(batches) * double(batches - 1);
  out.std_error = std::sqrt(var);
  out.samples_used = 16 * per * batches;
  out.unconverged = out.std_error > 0.5 * std::abs(out.value);
  return out;
}

}  // namespace kerrgate
