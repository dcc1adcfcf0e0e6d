// command line front end: sweeps and diagnostics written as CSV

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "kerrgate/gate_dispersion.hpp"
#include "kerrgate/gate_fast.hpp"
#include "kerrgate/jsa.hpp"
#include "kerrgate/numerics.hpp"
#include "kerrgate/oracles.hpp"

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot open output file: " + path);
  os << body;
  if (!os.good()) throw std::ios_base::failure("write failed: " + path);
}

std::vector<double> sweep(double lo, double hi, int steps) {
  if (steps < 2) throw std::domain_error("steps must be >= 2");
  std::vector<double> xs(steps);
  double h = (hi - lo) / (steps - 1);
  for (int i = 0; i < steps; ++i) xs[i] = lo + i * h;
  xs.back() = hi;
  return xs;
}

double parse_gamma(const std::string& s) {
  if (s == "auto") return kerrgate::derive_gamma();
  double g = std::stod(s);
  if (!(g > 0.0)) throw std::domain_error("gamma must be positive");
  return g;
}

kerrgate::FastKerrParams fast_params(double eta, double x) {
  if (!(eta > 0.0)) throw std::domain_error("eta must be positive");
  kerrgate::FastKerrParams p;
  p.sigma = 1.0;
  p.M = 1.0 / eta;
  p.X = x;
  return p;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// CLI11 only applies config files attached to the root app, so subcommands take
// --config as an ordinary option and we replay the file here.  Flat key = value
// lines, '#' starts a comment.  Flags given on the command line keep their value.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::ios_base::failure("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto where = [&] { return path + ":" + std::to_string(lineno); };
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::domain_error(where() + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::domain_error(where() + ": empty key");
    auto* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
    if (opt == nullptr)
      throw std::domain_error(where() + ": unknown key '" + key + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale spectral model of a fast cross-Kerr two-photon gate"};
  app.require_subcommand(1);

  std::string output;

  // fig2: fidelity against cross-phase scale
  auto* fig2 = app.add_subcommand("fig2", "fidelity F(X) sweep for the fast-response gate");
  double f2_eta = 0.01, f2_xmax = 100.0;
  int f2_steps = 201;
  fig2->add_option("--eta", f2_eta, "bandwidth ratio sigma/M")->check(CLI::PositiveNumber);
  fig2->add_option("--x-max", f2_xmax, "sweep upper end")->check(CLI::PositiveNumber);
  fig2->add_option("--steps", f2_steps, "sweep points including both ends")
      ->check(CLI::Range(2, 1000000));

  // fig3: residual phase against cross-phase scale
  auto* fig3 = app.add_subcommand("fig3", "residual phase theta(X) sweep");
  double f3_eta = 0.01, f3_xmax = 100.0;
  int f3_steps = 201;
  fig3->add_option("--eta", f3_eta, "bandwidth ratio sigma/M")->check(CLI::PositiveNumber);
  fig3->add_option("--x-max", f3_xmax, "sweep upper end")->check(CLI::PositiveNumber);
  fig3->add_option("--steps", f3_steps, "sweep points including both ends")
      ->check(CLI::Range(2, 1000000));

  // fig4: matched-strength fidelity against scaled medium length
  auto* fig4 = app.add_subcommand("fig4", "matched fidelity against scaled length");
  std::string f4_gamma = "auto";
  double f4_lmax = 200.0;
  int f4_steps = 200;
  fig4->add_option("--gamma", f4_gamma, "matching constant, number or 'auto'");
  fig4->add_option("--script-l-max", f4_lmax, "sweep upper end (lower end is 1)")
      ->check(CLI::PositiveNumber);
  fig4->add_option("--steps", f4_steps, "sweep points including both ends")
      ->check(CLI::Range(2, 1000000));

  // slow: truncation fidelity when the medium outlives the photons
  auto* slow = app.add_subcommand("slow", "slow-medium truncation fidelity sweep");
  double sl_xmax = 10.0;
  int sl_steps = 201, sl_ncut = 200;
  slow->add_option("--x-max", sl_xmax, "sweep upper end")->check(CLI::PositiveNumber);
  slow->add_option("--steps", sl_steps, "sweep points including both ends")
      ->check(CLI::Range(2, 1000000));
  slow->add_option("--n-cut", sl_ncut, "series truncation order")->check(CLI::PositiveNumber);

  // entangle: Schmidt diagnostics of the fast-gate output on a window
  auto* ent = app.add_subcommand("entangle", "purity and entropy of the gate output");
  double en_eta = 0.01, en_xmax = std::numbers::pi, en_window = 8.0;
  int en_steps = 9, en_points = 256;
  ent->add_option("--eta", en_eta, "bandwidth ratio sigma/M")->check(CLI::PositiveNumber);
  ent->add_option("--x-max", en_xmax, "sweep upper end")->check(CLI::PositiveNumber);
  ent->add_option("--steps", en_steps, "sweep points including both ends")
      ->check(CLI::Range(2, 1000000));
  ent->add_option("--window", en_window, "half width of the analysis window in sigma")
      ->check(CLI::PositiveNumber);
  ent->add_option("--grid-points", en_points, "grid points per axis")->check(CLI::PositiveNumber);

  // gamma: print the matching constant
  auto* gam = app.add_subcommand("gamma", "derive the gaussian/sinc matching constant");

  // length: convert a scaled length to physical units
  auto* len = app.add_subcommand("length", "physical medium length for a scaled length");
  double ln_sl = 100.0, ln_sigma = 1e13, ln_dk = 1e-8;
  std::string ln_gamma = "auto";
  len->add_option("--script-l", ln_sl, "scaled length")->check(CLI::PositiveNumber);
  len->add_option("--sigma", ln_sigma, "input marginal width, rad/s")->check(CLI::PositiveNumber);
  len->add_option("--dk", ln_dk, "inverse group velocity mismatch, s/m")
      ->check(CLI::PositiveNumber);
  len->add_option("--gamma", ln_gamma, "matching constant, number or 'auto'");

  // commutator: discretized generator commutator ratios
  auto* comm = app.add_subcommand("commutator", "commutator norm ratios of the generators");
  double cm_sigma = 1.0, cm_M = 10.0, cm_L = 10.0, cm_kp = 2.5, cm_ks = -2.5;
  double cm_t1 = 0.0, cm_t2 = 0.25, cm_coupling = 1.0, cm_extent = 6.0;
  int cm_points = 24;
  comm->add_option("--sigma", cm_sigma, "marginal width setting the extent unit")
      ->check(CLI::PositiveNumber);
  comm->add_option("--M", cm_M, "filter bandwidth")->check(CLI::PositiveNumber);
  comm->add_option("--L", cm_L, "medium length")->check(CLI::PositiveNumber);
  comm->add_option("--kp", cm_kp, "inverse group velocity, pump");
  comm->add_option("--ks", cm_ks, "inverse group velocity, signal");
  comm->add_option("--t1", cm_t1, "first time");
  comm->add_option("--t2", cm_t2, "second time");
  comm->add_option("--coupling", cm_coupling, "overall coupling");
  comm->add_option("--extent", cm_extent, "grid half width in sigma")->check(CLI::PositiveNumber);
  comm->add_option("--grid-points", cm_points, "grid points per axis")->check(CLI::PositiveNumber);

  // dyson: Monte Carlo second-order Dyson/Taylor comparison
  auto* dys = app.add_subcommand("dyson", "Monte Carlo second-order ordering check");
  double dy_sigma = 1e9, dy_M = 1e10;
  long long dy_samples = 100000;
  std::uint64_t dy_seed = 12345;
  dys->add_option("--sigma", dy_sigma, "input marginal width, rad/s")->check(CLI::PositiveNumber);
  dys->add_option("--M", dy_M, "response bandwidth, rad/s")->check(CLI::PositiveNumber);
  dys->add_option("--samples", dy_samples, "total sample budget")->check(CLI::PositiveNumber);
  dys->add_option("--seed", dy_seed, "RNG seed");

  std::string config_path;
  for (auto* sub : {fig2, fig3, fig4, slow, ent, gam, len, comm, dys}) {
    sub->add_option("--output,-o", output, "output CSV path (default <command>.csv)");
    sub->add_option("--config", config_path, "flat key = value config file; explicit flags win");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help() << "\n";
    return 1;
  }

  try {
    if (!config_path.empty())
      for (auto* sub : {fig2, fig3, fig4, slow, ent, gam, len, comm, dys})
        if (sub->parsed()) apply_config(sub, config_path);

    std::string body;
    std::string cmd;

    if (fig2->parsed()) {
      cmd = "fig2";
      body = "x,fidelity\n";
      for (double x : sweep(0.0, f2_xmax, f2_steps))
        body += fmt(x) + "," + fmt(kerrgate::fidelity_fast(fast_params(f2_eta, x))) + "\n";
    } else if (fig3->parsed()) {
      cmd = "fig3";
      body = "x,theta\n";
      for (double x : sweep(0.0, f3_xmax, f3_steps))
        body += fmt(x) + "," + fmt(kerrgate::theta(fast_params(f3_eta, x))) + "\n";
    } else if (fig4->parsed()) {
      cmd = "fig4";
      double g = parse_gamma(f4_gamma);
      body = "script_l,fidelity\n";
      for (double l : sweep(1.0, f4_lmax, f4_steps))
        body += fmt(l) + "," + fmt(kerrgate::fidelity_dispersion_matched(l, g)) + "\n";
    } else if (slow->parsed()) {
      cmd = "slow";
      body = "x,fidelity\n";
      for (double x : sweep(0.0, sl_xmax, sl_steps))
        body += fmt(x) + "," + fmt(kerrgate::fidelity_slow(x, sl_ncut)) + "\n";
    } else if (ent->parsed()) {
      cmd = "entangle";
      body = "x,purity,entropy\n";
      auto grid = kerrgate::FrequencyGrid::symmetric(en_window, en_points);
      for (double x : sweep(0.0, en_xmax, en_steps)) {
        auto st = kerrgate::output_state_fast(fast_params(en_eta, x), grid, true);
        auto sp = kerrgate::schmidt(st);
        body += fmt(x) + "," + fmt(sp.purity) + "," + fmt(sp.entropy) + "\n";
      }
    } else if (gam->parsed()) {
      cmd = "gamma";
      body = "gamma,x_half\n";
      body += fmt(kerrgate::derive_gamma()) + "," + fmt(kerrgate::sinc_half_root()) + "\n";
    } else if (len->parsed()) {
      cmd = "length";
      double g = parse_gamma(ln_gamma);
      body = "script_l,sigma,gamma,dk,length_m\n";
      body += fmt(ln_sl) + "," + fmt(ln_sigma) + "," + fmt(g) + "," + fmt(ln_dk) + "," +
              fmt(kerrgate::physical_length(ln_sl, ln_sigma, g, ln_dk)) + "\n";
    } else if (comm->parsed()) {
      cmd = "commutator";
      auto basis = kerrgate::TwoPhotonBasis{
          kerrgate::FrequencyGrid::symmetric(cm_extent * cm_sigma, cm_points)};
      body = "kind,grid,ratio\n";
      auto add = [&](const char* name, const kerrgate::KernelKind& k) {
        double r = kerrgate::commutator_norm_ratio(k, cm_t1, cm_t2, basis, cm_coupling);
        body += std::string(name) + "," + std::to_string(cm_points) + "," + fmt(r) + "\n";
      };
      add("gaussian_filter", kerrgate::KernelKind::gaussian_filter(cm_M));
      add("dispersion", kerrgate::KernelKind::dispersion(cm_L, cm_kp, cm_ks));
      add("combined", kerrgate::KernelKind::combined(cm_M, cm_L, cm_kp, cm_ks));
    } else if (dys->parsed()) {
      cmd = "dyson";
      auto r = kerrgate::dyson_taylor_second_order(dy_sigma, dy_M, dy_samples, dy_seed);
      if (r.unconverged)
        std::cerr << "warning: standard error exceeds half the estimate; increase --samples\n";
      body = "value,std_error,samples,seed\n";
      body += fmt(r.value) + "," + fmt(r.std_error) + "," + std::to_string(r.samples_used) +
              "," + std::to_string(dy_seed) + "\n";
    }

    if (output.empty()) output = cmd + ".csv";
    write_file(output, body);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
