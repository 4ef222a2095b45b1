// Acceptance suite: one PASS/FAIL line per criterion, JSON summary on request.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpc/errors.hpp"
#include "qpc/harness.hpp"
#include "qpc/ids.hpp"
#include "qpc/lyapunov.hpp"
#include "qpc/resonance.hpp"
#include "qpc/spectra.hpp"
#include "qpc/zeros.hpp"

using namespace qpc;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  Json data = Json::object();
};

struct Criterion {
  int id;
  std::string name;
  /// Wall-clock limit in seconds, or 0 when only an indicative duration is given.
  double time_limit;
  std::function<Outcome()> body;
};

CocycleParams am4() { return {Frequency::sqrt2(), Complex{}, TrigPotential::almost_mathieu(4.0)}; }
CocycleParams free_params() { return {Frequency::sqrt2(), Complex{}, TrigPotential::zero()}; }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

/// Energies at the given IDS levels, from a reference table over [-6, 6].
std::vector<double> dos_energies(std::span<const double> levels) {
  const auto table = ids_table(am4(), 512, 64, uniform_grid(-6.0, 6.0, 4096));
  return ids_quantiles(table, levels);
}

const std::vector<double>& figure_energies() {
  static const std::vector<double> e = dos_energies(std::vector<double>{0.3125, 0.6875});
  return e;
}

// 1 -------------------------------------------------------------------------
Outcome free_laplacian() {
  const int N = 100;
  const auto s = dirichlet_spectrum(free_params(), 0.0, N, false);
  double err = 0.0;
  for (int k = 1; k <= N; ++k)
    err = std::max(err, std::abs(s.eigenvalues[k - 1] + 2.0 * std::cos(k * std::numbers::pi / (N + 1))));
  return {err <= 1e-10, "max error " + fmt(err), {{"max_error", err}}};
}

// 2 -------------------------------------------------------------------------
Outcome monodromy_entries() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ue(-6.0, 6.0);
  std::uniform_int_distribution<int> un(3, 100);
  double worst = 0.0;
  auto dev = [](const ScaledComplex& a, const ScaledComplex& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero() ? 0.0 : INFINITY;
    return std::abs((a / b).value() - 1.0);
  };
  for (int i = 0; i < 50; ++i) {
    const auto p = am4().with_energy(ue(rng));
    const Complex z = phase_point(ux(rng));
    const int n = un(rng);
    const auto m = monodromy(p, z, n);
    worst = std::max({worst, dev(m.entry(0, 0), dirichlet_det(p, z, 1, n)),
                      dev(m.entry(0, 1), -dirichlet_det(p, z, 2, n)),
                      dev(m.entry(1, 0), dirichlet_det(p, z, 1, n - 1)),
                      dev(m.entry(1, 1), -dirichlet_det(p, z, 2, n - 1))});
  }
  return {worst <= 1e-9, "50 configurations, worst relative deviation " + fmt(worst), {{"worst", worst}}};
}

// 3 -------------------------------------------------------------------------
Outcome avalanche() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> un(2, 200);
  int admissible = 0, violations = 0;
  double worst_constant = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto chain = random_hyperbolic_chain(rng, static_cast<std::size_t>(un(rng)), 20.0, 40.0);
    const auto rep = ap_check(chain, std::exp(20.0), 10.0);
    if (!rep.gap) continue;
    ++admissible;
    if (!rep.holds()) ++violations;
    worst_constant = std::max(worst_constant, *rep.implied_constant);
  }
  return {admissible > 0 && violations == 0,
          std::to_string(admissible) + " admissible chains, " + std::to_string(violations) +
              " violations, largest implied constant " + fmt(worst_constant),
          {{"admissible", admissible}, {"violations", violations}, {"max_implied_constant", worst_constant}}};
}

// 4 -------------------------------------------------------------------------
Outcome ap_extrapolation() {
  double worst = 0.0;
  Json rows = Json::array();
  for (double E : {0.0, 1.0, -1.0, 2.0, -2.0}) {
    const auto r = ap_extrapolate(am4().with_energy(E), 64, 4096, 512);
    worst = std::max(worst, std::abs(r.difference));
    rows.push_back({{"energy", E}, {"difference", r.difference}});
  }
  return {worst <= 5e-3, "max |2L_128 - L_64 - L_4096| = " + fmt(worst), {{"rows", rows}}};
}

// 5 -------------------------------------------------------------------------
Outcome lyapunov_value() {
  const auto energies = dos_energies(midpoint_levels(8));
  double worst = 0.0;
  Json rows = Json::array();
  for (double E : energies) {
    const auto est = finite_lyapunov(am4().with_energy(E), 10000, 256);
    worst = std::max(worst, std::abs(est.value - std::log(2.0)));
    rows.push_back({{"energy", E}, {"L", est.value}, {"std_error", est.std_error}});
  }
  return {worst <= 0.02, "8 energies, max |L - log 2| = " + fmt(worst), {{"rows", rows}}};
}

// 6 -------------------------------------------------------------------------
Outcome jensen_sandwich() {
  const double r1 = 0.05, r2 = 0.01;
  const double scale = 4.0 * r1 * r1 / (r2 * r2);
  int failures = 0, cases = 0;
  double worst_err = 0.0;
  auto judge = [&](double scaled, double err, int inner, int outer) {
    // Quadrature allowance: ten times the refinement difference.
    const double slack = std::max(1e-6, 10.0 * scale * err);
    worst_err = std::max(worst_err, scale * err);
    ++cases;
    if (!(scaled >= inner - slack && scaled <= outer + slack)) ++failures;
  };

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> rad(0.0, 0.08), ang(0.0, 1.0), coef(-3.0, 3.0);
  std::uniform_int_distribution<int> deg(1, 6);
  for (int i = 0; i < 100; ++i) {
    std::vector<Complex> roots(static_cast<std::size_t>(deg(rng)));
    for (auto& z : roots) z = rad(rng) * unit_phase(ang(rng));
    // e^{a z} prod (z - root): the exponential factor is harmonic in log|f|.
    const Complex a(coef(rng), coef(rng));
    const RealField u = [roots, a](Complex z) {
      double v = (a * z).real();
      for (auto r : roots) v += std::log(std::abs(z - r));
      return v;
    };
    int inner = 0, outer = 0;
    for (auto r : roots) {
      inner += std::abs(r) < r1 - r2;
      outer += std::abs(r) < r1 + r2;
    }
    const auto J = jensen_average(u, 0.0, r1, r2, 32);
    judge(J.scaled(), J.error_estimate, inner, outer);
  }

  const double E = figure_energies()[1];
  const auto f = dirichlet_evaluator(am4().with_energy(E), 70);
  for (int k = 0; k < 2; ++k) {
    const Complex z0 = unit_phase(0.25 * k);
    const auto J = jensen_average(log_abs(f), z0, r1, r2, 32);
    judge(J.scaled(), J.error_estimate, count_zeros_disk(f, z0, r1 - r2), count_zeros_disk(f, z0, r1 + r2));
  }
  return {failures == 0,
          std::to_string(cases) + " cases, " + std::to_string(failures) + " failures, worst scaled error " +
              fmt(worst_err),
          {{"cases", cases}, {"failures", failures}, {"worst_scaled_error", worst_err}}};
}

// 7 -------------------------------------------------------------------------
Outcome zero_census(const fs::path& workdir) {
  bool ok = true;
  Json rows = Json::array();
  std::string detail;
  for (std::size_t i = 0; i < figure_energies().size(); ++i) {
    const double E = figure_energies()[i];
    const auto zs = locate_zeros(am4(), 70, E, 0.45);
    const auto eq = equidistribution_stats(zs);
    const bool row_ok = zs.total_count == 140 && zs.counted() == 140 && eq.max_radial <= 0.1 &&
                        eq.angular_discrepancy <= 0.15;
    ok = ok && row_ok;
    rows.push_back({{"energy", E},
                    {"winding", zs.total_count},
                    {"located", zs.counted()},
                    {"max_radial", eq.max_radial},
                    {"discrepancy", eq.angular_discrepancy}});
    detail += "E=" + fmt(E) + ": " + std::to_string(zs.counted()) + "/" + std::to_string(zs.total_count) +
              " zeros, radial " + fmt(eq.max_radial) + ", discrepancy " + fmt(eq.angular_discrepancy) + "; ";
    fs::create_directories(workdir);
    std::ofstream svg(workdir / ("zeros_" + std::to_string(i) + ".svg"));
    write_svg(svg, zs, {"zeros of f_70, E = " + fmt(E), true, 0.45});
  }
  return {ok, detail, {{"rows", rows}}};
}

// 8 -------------------------------------------------------------------------
Outcome per_disk() {
  const double r0 = std::exp(-std::pow(std::log(70.0), 2.0));
  int worst = 0;
  for (double E : dos_energies(midpoint_levels(16)))
    worst = std::max(worst, per_disk_count(locate_zeros(am4(), 70, E, 0.45), r0));
  return {worst <= 2, "16 energies, max zeros per disk " + std::to_string(worst) + " (bound 2)",
          {{"max_count", worst}, {"r0", r0}}};
}

// 9 -------------------------------------------------------------------------
Outcome concatenation() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ue(-6.0, 6.0);
  int violations = 0;
  double worst_ratio = 0.0;
  for (int i = 0; i < 32; ++i) {
    const auto cb = count_bound_check(am4(), ux(rng), 256, ue(rng), 1.0 / 256);
    if (!cb.holds()) ++violations;
    if (cb.bound > 0.0) worst_ratio = std::max(worst_ratio, cb.count / cb.bound);
  }
  return {violations == 0, "32 points, " + std::to_string(violations) + " violations, max count/bound " + fmt(worst_ratio),
          {{"violations", violations}, {"max_ratio", worst_ratio}}};
}

// 10 ------------------------------------------------------------------------
Outcome ids_free() {
  const auto grid = uniform_grid(-2.5, 2.5, 1000);
  const auto t = ids_table(free_params(), 512, 256, grid);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) err = std::max(err, std::abs(t.values[i] - free_ids(grid[i])));
  return {err <= 3.0 / 512, "sup deviation " + fmt(err * 512) + "/N", {{"sup_deviation", err}}};
}

// 11 ------------------------------------------------------------------------
Outcome holder() {
  const auto t = ids_table(am4(), 512, 256, uniform_grid(-6.0, 6.0, 6000));
  std::vector<double> etas;
  for (int i = 0; i < 8; ++i) etas.push_back(2e-3 * std::pow(25.0, i / 7.0));
  const auto h = holder_scan(t, etas);
  return {h.exponent >= 0.35, "fitted exponent " + fmt(h.exponent), {{"exponent", h.exponent}}};
}

// 12 ------------------------------------------------------------------------
Outcome thouless() {
  const auto t = ids_table(am4(), 512, 64, uniform_grid(-6.0, 6.0, 2400));
  const auto energies = ids_quantiles(t, midpoint_levels(8));
  const auto rep = thouless_check(t, energies, am4(), 256);
  const double r = rep.max_abs_residual();
  return {r <= 5e-2, "8 energies, max residual " + fmt(r), {{"max_residual", r}}};
}

// 13 ------------------------------------------------------------------------
Outcome wegner() {
  const double E = dos_energies(std::vector<double>{0.5625})[0];
  std::vector<double> H;
  for (int h = 3; h <= 12; ++h) H.push_back(h);
  const auto w = wegner_count(am4(), 128, E, H, 16384);
  return {w.fitted_points >= 2 && w.slope < 0.0,
          "slope " + fmt(w.slope) + " over " + std::to_string(w.fitted_points) + " points",
          {{"slope", w.slope}, {"fitted_points", w.fitted_points}}};
}

// 14 ------------------------------------------------------------------------
Outcome gaps() {
  const std::vector<double> delta{0.5};
  const auto g = min_gap_stats(am4(), 100, 256, std::nullopt, delta);
  const double frac = g.small_gap_fraction.at(0).second;
  return {g.all_positive && frac <= 0.1,
          std::string(g.all_positive ? "all gaps positive" : "zero gap found") + ", fraction below e^-10: " + fmt(frac),
          {{"all_positive", g.all_positive}, {"fraction", frac}}};
}

// 15 ------------------------------------------------------------------------
Outcome resultants() {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> deg(3, 4);
  double worst = 0.0, worst_self = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<Complex> a(static_cast<std::size_t>(deg(rng))), b(static_cast<std::size_t>(deg(rng)));
    for (auto& z : a) z = Complex(g(rng), g(rng));
    for (auto& z : b) z = Complex(g(rng), g(rng));
    const auto f = MonicPolynomial::from_roots(a), h = MonicPolynomial::from_roots(b);
    worst = std::max(worst, std::abs((sylvester_resultant(f, h) / root_product(a, b)).value() - 1.0));
    worst_self = std::max(worst_self, std::abs(sylvester_resultant(f, f).value()));
  }
  return {worst <= 1e-8 && worst_self <= 1e-10,
          "1000 pairs, max relative deviation " + fmt(worst) + ", max |Res(f,f)| " + fmt(worst_self),
          {{"max_relative", worst}, {"max_self", worst_self}}};
}

// 16 ------------------------------------------------------------------------
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

Outcome determinism(const fs::path& workdir) {
  const fs::path dir = workdir / "determinism";
  std::map<std::string, std::string> first;
  Json exits = Json::object();
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(dir);
    for (const auto& e : harness::catalog()) {
      auto raw = harness::default_config(e.name);
      raw["output_dir"] = dir.string();
      raw["reproducible"] = true;
      const auto res = harness::run(harness::parse_config(raw));
      exits[e.name] = res.exit_code;
    }
    if (pass == 0) first = snapshot(dir);
  }
  const auto second = snapshot(dir);
  std::vector<std::string> differing;
  for (const auto& [k, v] : first) {
    const auto it = second.find(k);
    if (it == second.end() || it->second != v) differing.push_back(k);
  }
  for (const auto& [k, v] : second)
    if (!first.contains(k)) differing.push_back(k);
  return {differing.empty() && !first.empty(),
          std::to_string(first.size()) + " files compared, " + std::to_string(differing.size()) + " differ",
          {{"files", first.size()}, {"differing", differing}, {"exit_codes", exits}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string summary_path, workdir = "acceptance_runs";
  std::vector<int> only;
  app.add_option("--summary", summary_path, "write a JSON summary here");
  app.add_option("--workdir", workdir, "scratch directory for experiment runs");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const fs::path wd(workdir);
  const std::vector<Criterion> criteria = {
      {1, "free Laplacian eigenvalues", 0.1, free_laplacian},
      {2, "monodromy entries are determinants", 1.0, monodromy_entries},
      {3, "avalanche principle", 10.0, avalanche},
      {4, "AP extrapolation", 0.0, ap_extrapolation},
      {5, "Lyapunov exponent log 2", 0.0, lyapunov_value},
      {6, "Jensen sandwich", 30.0, jensen_sandwich},
      {7, "zero census N = 70", 0.0, [&] { return zero_census(wd / "figures"); }},
      {8, "zeros per small disk", 0.0, per_disk},
      {9, "concatenation bound", 0.0, concatenation},
      {10, "free IDS closed form", 30.0, ids_free},
      {11, "Hoelder exponent", 0.0, holder},
      {12, "Thouless formula", 0.0, thouless},
      {13, "Wegner decay", 0.0, wegner},
      {14, "simple Dirichlet spectrum", 0.0, gaps},
      {15, "resultant algebra", 5.0, resultants},
      {16, "determinism", 0.0, [&] { return determinism(wd); }},
  };

  Json results = Json::array();
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), Json::object()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.time_limit <= 0.0 || secs < c.time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << o.detail << " (" << fmt(secs)
         << " s";
    if (c.time_limit > 0.0) line << ", limit " << c.time_limit << " s";
    line << ")";
    std::cout << line.str() << std::endl;
    results.push_back({{"id", c.id},
                       {"name", c.name},
                       {"pass", pass},
                       {"value_ok", o.pass},
                       {"seconds", secs},
                       {"time_limit", c.time_limit},
                       {"detail", o.detail},
                       {"data", o.data}});
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  if (!summary_path.empty()) {
    std::ofstream out(summary_path);
    out << Json{{"criteria", results}, {"failed", failed}, {"all_pass", failed == 0}}.dump(2) << "\n";
  }
  return failed == 0 ? 0 : 1;
}
