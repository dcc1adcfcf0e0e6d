#pragma once

// series engine, medium response model and quadrature helpers shared by the
// gate modules

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kerrgate {

namespace detail {

// componentwise Neumaier step; R is double or a wider float type
template <typename R>
void neumaier_add(R& sum, R& comp, const R& x) {
  using std::fabs;
  R t = sum + x;
  if (fabs(sum) >= fabs(x))
    comp += (sum - t) + x;
  else
    comp += (x - t) + sum;
  sum = t;
}

template <typename C>
bool finite_parts(const C& z) {
  using std::isfinite;
  return isfinite(z.real()) && isfinite(z.imag());
}

template <typename R>
double as_double(const R& x) {
  return static_cast<double>(x);
}

}  // namespace detail

template <typename C>
struct BasicSeriesSum {
  C value{};
  int terms_used = 0;
  double max_term_magnitude = 0.0;
  double last_term_magnitude = 0.0;
  bool converged = false;
};

using SeriesSum = BasicSeriesSum<std::complex<double>>;

// Sums term(0), term(1), ... where next(n, term_n) yields term(n+1).
// Compensated accumulation; stops at the first index past the running
// magnitude peak whose term drops below tol*max(1, |sum|), or at n_max.
// A non-finite term aborts with the offending index in the message.
template <typename C, typename Rec>
BasicSeriesSum<C> sum_series(Rec&& next, C first_term, int n_max, double tol) {
  if (n_max < 1) throw std::domain_error("sum_series: n_max must be >= 1");
  if (!(tol > 0.0)) throw std::domain_error("sum_series: tol must be positive");

  using R = decltype(first_term.real() + 0.0);
  R sr{}, cr{}, si{}, ci{};
  C term = first_term;
  BasicSeriesSum<C> out;
  int peak_index = 0;
  R peak{};

  for (int n = 0;; ++n) {
    if (!detail::finite_parts(term))
      throw std::overflow_error("sum_series: non-finite term at n=" + std::to_string(n));
    detail::neumaier_add(sr, cr, R(term.real()));
    detail::neumaier_add(si, ci, R(term.imag()));
    using std::abs;
    R mag = abs(term);
    if (mag > peak) {
      peak = mag;
      peak_index = n;
    }
    out.terms_used = n + 1;
    out.last_term_magnitude = detail::as_double(mag);

    R vr = sr + cr, vi = si + ci;
    using std::sqrt;
    R vmag = sqrt(vr * vr + vi * vi);
    R floor_ = vmag > R(1) ? vmag : R(1);
    bool settled = n > peak_index && mag < R(tol) * floor_;
    if (settled || n == n_max) {
      out.value = C(vr, vi);
      out.max_term_magnitude = detail::as_double(peak);
      out.converged = mag <= R(tol) * floor_;
      return out;
    }
    term = next(n, term);
  }
}

// root of sin(x)/x = 1/2 on (1, 2)
inline double sinc_half_root() {
  auto f = [](double x) { return std::sin(x) / x - 0.5; };
  double lo = 1.0, hi = 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// gaussian/sinc matching constant: ln2 / x_half^2
inline double derive_gamma() {
  double x = sinc_half_root();
  return std::log(2.0) / (x * x);
}

enum class ResponseBranch { underdamped, critical };

struct ResponseParams {
  double K = 1.0;      // zero-frequency response
  double Omega = 1.0;  // resonance frequency
  double Gamma = 1.0;  // damping rate
  double M = 1.0;      // surrogate bandwidth
};

inline void validate(const ResponseParams& p, ResponseBranch branch) {
  if (!(p.Omega > 0.0)) throw std::domain_error("response: Omega must be positive");
  if (!(p.Gamma > 0.0)) throw std::domain_error("response: Gamma must be positive");
  if (!(p.M > 0.0)) throw std::domain_error("response: M must be positive");
  if (branch == ResponseBranch::underdamped && !(p.Gamma < 2.0 * p.Omega))
    throw std::domain_error("response: underdamped branch needs Gamma < 2*Omega");
}

// causal ring-down of the medium; zero for tau <= 0
inline double response_function(double tau, const ResponseParams& p, ResponseBranch branch) {
  validate(p, branch);
  if (tau <= 0.0) return 0.0;
  if (branch == ResponseBranch::critical)
    return p.K * p.Omega * p.Omega * tau * std::exp(-p.Omega * tau);
  double w = std::sqrt(p.Omega * p.Omega - 0.25 * p.Gamma * p.Gamma);
  return p.K * p.Omega * p.Omega / w * std::exp(-0.5 * p.Gamma * tau) * std::sin(w * tau);
}

// unit-area gaussian stand-in for the response, bandwidth M
inline double gaussian_surrogate(double tau, double M) {
  if (!(M > 0.0)) throw std::domain_error("gaussian_surrogate: M must be positive");
  static const double inv_sqrt_pi = 1.0 / std::sqrt(std::acos(-1.0));
  return M * inv_sqrt_pi * std::exp(-M * M * tau * tau);
}

// frequency-domain factor of the surrogate acting on a detuning difference
inline double frequency_filter(double delta, double M) {
  if (!(M > 0.0)) throw std::domain_error("frequency_filter: M must be positive");
  return 0.5 * std::exp(-delta * delta / (4.0 * M * M));
}

// full width at half maximum of the surrogate, measured by bisection rather
// than read off the closed form
inline double gaussian_surrogate_fwhm(double M) {
  if (!(M > 0.0)) throw std::domain_error("gaussian_surrogate_fwhm: M must be positive");
  double peak = gaussian_surrogate(0.0, M);
  double lo = 0.0, hi = 2.0 / M;
  while (gaussian_surrogate(hi, M) > 0.5 * peak) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (gaussian_surrogate(mid, M) > 0.5 * peak ? lo : hi) = mid;
  }
  return hi + lo;  // symmetric about 0
}

// uniform tensor grid over [nu_min, nu_max] with trapezoid weights
struct FrequencyGrid {
  double nu_min = -1.0;
  double nu_max = 1.0;
  int points_per_axis = 16;
  std::vector<double> points;
  std::vector<double> weights;

  FrequencyGrid(double lo, double hi, int n) : nu_min(lo), nu_max(hi), points_per_axis(n) {
    if (!(nu_min < 0.0 && 0.0 < nu_max))
      throw std::domain_error("FrequencyGrid: need nu_min < 0 < nu_max");
    if (points_per_axis < 16)
      throw std::domain_error("FrequencyGrid: need at least 16 points per axis");
    double h = (nu_max - nu_min) / (points_per_axis - 1);
    points.resize(points_per_axis);
    weights.assign(points_per_axis, h);
    for (int i = 0; i < points_per_axis; ++i) points[i] = nu_min + i * h;
    points.back() = nu_max;  // keep the endpoint exact
    weights.front() = 0.5 * h;
    weights.back() = 0.5 * h;
  }

  static FrequencyGrid symmetric(double extent, int n) { return {-extent, extent, n}; }

  double spacing() const { return (nu_max - nu_min) / (points_per_axis - 1); }

  bool same_layout(const FrequencyGrid& o) const {
    return nu_min == o.nu_min && nu_max == o.nu_max && points_per_axis == o.points_per_axis;
  }
};

// trapezoid product rule over the grid; f(nu_p, nu_s) -> complex
template <typename F>
std::complex<double> integrate_2d(F&& f, const FrequencyGrid& g) {
  std::complex<double> acc = 0.0;
  for (int i = 0; i < g.points_per_axis; ++i) {
    std::complex<double> row = 0.0;
    for (int j = 0; j < g.points_per_axis; ++j) {
      std::complex<double> v = f(g.points[i], g.points[j]);
      if (!detail::finite_parts(v))
        throw std::runtime_error("integrate_2d: non-finite integrand at nu_p=" +
                                 std::to_string(g.points[i]) + ", nu_s=" +
                                 std::to_string(g.points[j]));
      row += g.weights[j] * v;
    }
    acc += g.weights[i] * row;
  }
  return acc;
}

}  // namespace kerrgate
