#include <catch2/catch_amalgamated.hpp>

#include <kerrgate/jsa.hpp>

#include <cmath>
#include <complex>
#include <sstream>

using namespace kerrgate;
using Catch::Approx;
using cplx = std::complex<double>;

namespace {

// the three coefficient sets used to pin the closed-form gaussian integral
// against brute-force quadrature
GaussianTwoPhotonAmplitude quad_case(int k) {
    GaussianTwoPhotonAmplitude f;
    f.scale = 1.0;
    switch (k) {
        case 0:
            f.c1p = {0.8, 0.3};  f.c1s = {0.6, -0.2};
            f.c3 = {0.5, 0.1};
            f.c2p = {0.3, -0.7}; f.c2s = {-0.2, 0.4};
            f.c4 = {0.1, -0.2};
            break;
        case 1:
            f.c1p = {1.2, 0.0};  f.c1s = {0.9, 0.4};
            f.c3 = {-0.7, 0.2};
            f.c2p = {0.0, 1.1};  f.c2s = {0.5, 0.0};
            break;
        default:
            f.c1p = {0.35, -0.1};  f.c1s = {0.5, 0.25};
            f.c3 = {0.3, -0.3};
            f.c2p = {-0.4, -0.2};  f.c2s = {0.1, 0.6};
            f.c4 = {-0.3, 0.05};
    }
    return f;
}

}  // namespace

TEST_CASE("input state is a unit-norm separable gaussian", "[jsa]") {
    auto f = input_state(2.0);
    CHECK(f.c1p == cplx(1.0 / 16.0, 0.0));
    CHECK(f.c1s == cplx(1.0 / 16.0, 0.0));
    CHECK(f.c3 == cplx(0.0, 0.0));
    CHECK(f.scale.real() == Approx(1.0 / (2.0 * std::sqrt(2.0 * std::numbers::pi))).epsilon(1e-14));
    CHECK(is_square_integrable(f));
    CHECK(analytic_overlap(f, f).real() == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(analytic_overlap(f, f).imag()) < 1e-15);

    CHECK_THROWS_AS(input_state(0.0), std::domain_error);
}

TEST_CASE("pointwise evaluation", "[jsa]") {
    GaussianTwoPhotonAmplitude flat;  // all coefficients zero
    CHECK(evaluate(flat, 0.3, -0.7) == cplx(1.0, 0.0));
    CHECK_FALSE(is_square_integrable(flat));

    auto f = input_state(1.0);
    double x = 0.4, y = -1.3;
    cplx expect = f.scale * std::exp(-0.25 * (x * x + y * y));
    CHECK(std::abs(evaluate(f, x, y) - expect) < 1e-16);
}

TEST_CASE("square-integrability needs the cross term dominated", "[jsa]") {
    GaussianTwoPhotonAmplitude f;
    f.c1p = f.c1s = {0.5, 0.0};
    f.c3 = {0.9, 0.0};
    CHECK(is_square_integrable(f));  // 4*0.25 > 0.81
    f.c3 = {1.1, 0.0};
    CHECK_FALSE(is_square_integrable(f));  // 4*0.25 < 1.21
    f.c3 = {0.0, 5.0};  // imaginary part is free
    CHECK(is_square_integrable(f));
}

TEST_CASE("closed-form overlap agrees with quadrature", "[jsa]") {
    GaussianTwoPhotonAmplitude unit;  // conj(unit)*g = g
    auto grid = FrequencyGrid::symmetric(14.0, 1401);
    for (int k = 0; k < 3; ++k) {
        auto f = quad_case(k);
        REQUIRE(is_square_integrable(f));
        cplx closed = analytic_overlap(unit, f);
        cplx brute = integrate_2d([&](double x, double y) { return evaluate(f, x, y); }, grid);
        INFO("case " << k);
        CHECK(std::abs(closed - brute) < 1e-8 * std::abs(closed));
    }
}

TEST_CASE("overlap is conjugate-symmetric and rejects divergent pairs", "[jsa]") {
    auto a = quad_case(0);
    auto b = quad_case(2);
    cplx ab = analytic_overlap(a, b);
    cplx ba = analytic_overlap(b, a);
    CHECK(std::abs(ab - std::conj(ba)) < 1e-14 * std::abs(ab));

    GaussianTwoPhotonAmplitude diverges;
    diverges.c1p = {-1.0, 0.0};
    diverges.c1s = {1.0, 0.0};
    CHECK_THROWS_AS(analytic_overlap(diverges, diverges), std::domain_error);
    // pairwise combination can diverge even when one factor is fine
    CHECK_THROWS_AS(analytic_overlap(input_state(1.0), diverges), std::domain_error);
}

TEST_CASE("sampling onto a grid guards against clipping", "[jsa]") {
    auto f = input_state(1.0);
    auto g = to_grid(f, FrequencyGrid::symmetric(8.0, 64));
    CHECK(g.values.size() == 64 * 64);
    // centre sample is the peak
    CHECK(std::abs(g.at(31, 31)) > std::abs(g.at(0, 31)));

    try {
        to_grid(f, FrequencyGrid::symmetric(3.0, 32));
        FAIL("expected clipping rejection");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("edge/peak") != std::string::npos);
    }
}

TEST_CASE("grid overlap reproduces the analytic value", "[jsa]") {
    auto f = input_state(1.0);
    auto grid = FrequencyGrid::symmetric(12.0, 241);
    auto g = to_grid(f, grid);
    cplx n2 = grid_overlap(g, g);
    CHECK(n2.real() == Approx(1.0).epsilon(1e-10));

    // mixed overlap against a shifted-width state
    auto f2 = input_state(1.3);
    auto g2 = to_grid(f2, grid);
    cplx closed = analytic_overlap(f, f2);
    cplx gridded = grid_overlap(g, g2);
    CHECK(std::abs(closed - gridded) < 1e-9 * std::abs(closed));

    auto other = to_grid(f, FrequencyGrid::symmetric(12.0, 242));
    CHECK_THROWS_AS(grid_overlap(g, other), std::domain_error);
}

TEST_CASE("schmidt spectrum of a correlated gaussian", "[jsa]") {
    // exp(-a(x^2+y^2) - b*x*y) with a=0.25, b=0.2 on the reference grid
    auto grid = FrequencyGrid::symmetric(8.0, 256);
    GriddedAmplitude g{grid, {}};
    g.values.resize(256 * 256);
    for (int i = 0; i < 256; ++i)
        for (int j = 0; j < 256; ++j) {
            double x = grid.points[i], y = grid.points[j];
            g.at(i, j) = std::exp(-0.25 * (x * x + y * y) - 0.2 * x * y);
        }

    auto s = schmidt(g);
    CHECK(s.purity == Approx(0.9165151389919325).epsilon(1e-9));
    CHECK(s.entropy == Approx(0.2701546020298164).epsilon(1e-9));
    // closed form sqrt(1 - (b/2a)^2) for this family
    CHECK(s.purity == Approx(std::sqrt(1.0 - 0.16)).epsilon(1e-6));

    double total = 0.0;
    for (double l : s.lambdas) total += l;
    CHECK(total == Approx(1.0).epsilon(1e-8));
    CHECK(std::is_sorted(s.lambdas.rbegin(), s.lambdas.rend()));

    // truncation changes the reported list, not the summary numbers
    auto s5 = schmidt(g, 5);
    CHECK(s5.lambdas.size() == 5);
    CHECK(s5.purity == Approx(s.purity).epsilon(1e-14));

    // overall rescaling by a complex constant is invisible
    GriddedAmplitude h = g;
    for (auto& v : h.values) v *= cplx(2.0, -0.5);
    auto sh = schmidt(h);
    CHECK(sh.purity == Approx(s.purity).epsilon(1e-10));
    CHECK(sh.entropy == Approx(s.entropy).epsilon(1e-10));

    GriddedAmplitude zero{grid, std::vector<cplx>(256 * 256, cplx(0.0, 0.0))};
    CHECK_THROWS_AS(schmidt(zero), std::domain_error);
}

TEST_CASE("entanglement grows with the cross coupling", "[jsa]") {
    const double expected[] = {1.0, 0.9949874371066211, 0.9797958971132797,
                               0.9539392014170136, 0.9165151389919325};
    auto grid = FrequencyGrid::symmetric(8.0, 256);
    double prev = 2.0;
    for (int k = 0; k < 5; ++k) {
        double b = 0.05 * k;
        GriddedAmplitude g{grid, {}};
        g.values.resize(256 * 256);
        for (int i = 0; i < 256; ++i)
            for (int j = 0; j < 256; ++j) {
                double x = grid.points[i], y = grid.points[j];
                g.at(i, j) = std::exp(-0.25 * (x * x + y * y) - b * x * y);
            }
        double purity = schmidt(g).purity;
        INFO("b = " << b);
        CHECK(purity == Approx(expected[k]).epsilon(1e-9));
        CHECK(purity < prev);
        prev = purity;
    }
}

TEST_CASE("csv export format", "[jsa]") {
    auto g = to_grid(input_state(1.0), FrequencyGrid::symmetric(8.0, 16));
    std::ostringstream os;
    write_csv(g, os);
    std::string text = os.str();

    CHECK(text.rfind("nu_p,nu_s,re,im\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 16 * 16);
    // first row is the (-8, -8) corner with 11 e-format digits
    CHECK(text.find("-8.00000000000e+00,-8.00000000000e+00,") != std::string::npos);
    CHECK(text.find('\r') == std::string::npos);
}
