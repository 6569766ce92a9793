// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any selected criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tasep/bethe.hpp"
#include "tasep/format.hpp"
#include "tasep/scaling.hpp"
#include "tasep/spectra.hpp"
#include "tasep/yangbaxter.hpp"

using namespace tasep;
namespace fs = std::filesystem;

namespace {

const std::vector<double> kReference{-1.6336892192762, -1.6252314332778, -1.6092183117219, -1.5952666540982,
                                     -1.5839870664789, -1.5749003909369, -1.5674968193872, -1.5613778750522,
                                     -1.5562495252464, -1.5518961566109};

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// The L = 6..36 chain is shared between criteria 4, 5 and 6.
struct Chain {
  std::vector<BetheRootSet> roots;
  double seconds = 0.0;
};

const Chain& chain() {
  static std::optional<Chain> c;
  if (!c) {
    Stopwatch w;
    Chain out;
    out.roots = gap_state_chain(36);
    out.seconds = w.seconds();
    c = std::move(out);
  }
  return *c;
}

std::vector<Extrapolant> computed_extrapolants() {
  GapSeries s;
  for (auto& r : chain().roots) {
    s.lengths.push_back(r.length);
    s.gaps.push_back(energy_from_roots(r, EnergyMap{}).real());
  }
  s.validate();
  return local_exponent(s);
}

Outcome generator_validity() {
  Stopwatch w;
  double worst_sum = 0.0;
  int sectors = 0, ergodic = 0, bad_zero = 0;
  std::string first_bad;
  for (int L = 2; L <= 8; ++L)
    for (auto& s : all_sectors(L)) {
      auto g = build_hamiltonian_tasep(s);
      ++sectors;
      worst_sum = std::max(worst_sum, g.matrix.column_sums().cwiseAbs().maxCoeff());
      if (!is_ergodic(g)) continue;
      ++ergodic;
      auto r = dense_spectrum(g);
      if (r.zero_count != 1) {
        ++bad_zero;
        if (first_bad.empty()) first_bad = fmt(" first offender L=%d (%d,%d) zeros=%d", L, s.n_a, s.n_b, r.zero_count);
      }
    }
  double t = w.seconds();
  bool ok = worst_sum <= 1e-12 && bad_zero == 0 && ergodic > 0 && t < 60.0;
  return {ok, fmt("%d sectors L<=8, max |column sum| %.2e, %d ergodic with exactly one zero: %d, %.1fs%s", sectors,
                  worst_sum, ergodic, ergodic - bad_zero, t, first_bad.c_str())};
}

Outcome integrability() {
  Stopwatch w;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto draw = [&] {
    for (;;) {
      Complex z(u(rng), u(rng));
      if (std::abs(z) <= 1.0) return z;
    }
  };
  double ybe = 0.0;
  for (int i = 0; i < 100; ++i) {
    Complex a = draw(), b = draw(), c = draw();
    ybe = std::max(ybe, check_yang_baxter(a, b, c));
  }
  std::string transfer;
  double disc = 0.0;
  for (int L : {2, 3}) {
    auto th = hamiltonian_from_transfer(L);
    auto cal = calibrate_transfer_convention(th.matrix, build_hamiltonian_tasep(L));
    disc = std::max(disc, cal.discrepancy);
    transfer += fmt(" L=%d: %s scale %.6f offset %.6f discrepancy %.2e;", L, to_string(cal.orientation), cal.scale,
                    cal.offset, cal.discrepancy);
  }
  double t = w.seconds();
  return {ybe <= 1e-12 && disc <= 1e-6 && t < 60.0,
          fmt("max braid residual over 100 triples %.2e;%s %.1fs", ybe, transfer.c_str(), t)};
}

Outcome oracle_equivalence() {
  Stopwatch w;
  bool ok = true;
  std::string detail;
  for (int L : {6, 9}) {
    const int p = L / 3;
    auto roots = solve_bethe(L, p, 0, gap_state_integers(p), {});
    Complex e = energy_from_roots(roots, EnergyMap{});
    Complex equal = *dense_spectrum(build_hamiltonian_tasep(Sector{L, p, p, {}})).gap;
    Complex counted = *dense_spectrum(build_hamiltonian_tasep(Sector{L, L - p, p, {}})).gap;
    double d = std::abs(e.real() - equal.real());
    ok = ok && d <= 1e-9 && std::abs(e.real() - counted.real()) <= 1e-9;
    detail += fmt("L=%d Bethe %.15f ED(%d,%d) %.15f diff %.1e, ED(%d,%d) diff %.1e; ", L, e.real(), p, p,
                  equal.real(), d, L - p, p, std::abs(e.real() - counted.real()));
  }
  double t = w.seconds();
  return {ok && t < 120.0, detail + fmt("%.1fs", t)};
}

Outcome table_reproduction() {
  auto ex = computed_extrapolants();
  double worst = 0.0;
  int worst_l = 0;
  for (std::size_t i = 0; i < kReference.size(); ++i) {
    double d = std::abs(ex[i].value - kReference[i]);
    if (d > worst) {
      worst = d;
      worst_l = ex[i].length;
    }
  }
  double res = 0.0;
  for (auto& r : chain().roots) res = std::max(res, r.residual_norm);
  bool ok = ex.size() == 10 && ex.front().length == 6 && ex.back().length == 33 && worst <= 1e-8 &&
            chain().seconds < 600.0;
  return {ok, fmt("10 extrapolants, max deviation from reference extrapolants %.2e (L=%d); chain to L=36 in %.2fs, "
                  "max Bethe residual %.1e",
                  worst, worst_l, chain().seconds, res)};
}

Outcome exponent() {
  auto ex = computed_extrapolants();
  std::vector<double> ls, vs;
  for (auto& e : ex) {
    ls.push_back(e.length);
    vs.push_back(e.value);
  }
  auto t = bst_scan(ls, vs);
  auto ref = bst_scan(ls, kReference);
  double z = -t.limit;
  return {std::abs(z - 1.5) <= 1e-5 && std::abs(-ref.limit - 1.5) <= 1e-5,
          fmt("z = %.9f (omega %.1f, error %.2e); reference extrapolants give z = %.9f", z, t.omega,
              t.error_estimate, -ref.limit)};
}

Outcome root_pattern(const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream band(out_dir / "root_band.csv");
  band << "L,min_abs_Z,max_abs_Z,width_Z,min_abs_lambda,max_abs_lambda,conjugation_defect\n";
  double worst_defect = 0.0;
  std::vector<double> widths;
  for (auto& r : chain().roots) {
    double lo = 1e300, hi = 0.0, llo = 1e300, lhi = 0.0;
    for (Complex z : r.z) {
      lo = std::min(lo, std::abs(z));
      hi = std::max(hi, std::abs(z));
    }
    for (Complex l : r.lambda()) {
      llo = std::min(llo, std::abs(l));
      lhi = std::max(lhi, std::abs(l));
    }
    double defect = conjugation_defect(r);
    worst_defect = std::max(worst_defect, defect);
    widths.push_back(hi - lo);
    band << r.length << ',' << format_double(lo) << ',' << format_double(hi) << ',' << format_double(hi - lo) << ','
         << format_double(llo) << ',' << format_double(lhi) << ',' << format_double(defect) << '\n';
    std::ofstream(out_dir / ("roots_L" + std::to_string(r.length) + "_Z.csv")) << root_curve_csv(r, true);
    std::ofstream(out_dir / ("roots_L" + std::to_string(r.length) + "_lambda.csv")) << root_curve_csv(r, false);
  }
  bool shrinking = true;
  for (std::size_t i = 1; i < widths.size(); ++i) shrinking = shrinking && widths[i] < widths[i - 1];
  bool closed = worst_defect <= 1e-10;
  return {closed && shrinking,
          fmt("max conjugation defect %.3f (needs <= 1e-10); |Z| band width %.3f at L=6 -> %.3f at L=36 (%s); "
              "curves and band in %s",
              worst_defect, widths.front(), widths.back(), shrinking ? "shrinking" : "not shrinking",
              out_dir.string().c_str())};
}

Outcome properties() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> parts;
  bool ok = true;
  const auto states = gap_state_chain(15);

  // energy under root permutations
  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      auto s = states[i % states.size()];
      Complex e0 = energy_from_roots(s, EnergyMap{});
      std::vector<int> perm(s.p());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      auto t = s;
      for (int k = 0; k < s.p(); ++k) {
        t.z[k] = s.z[perm[k]];
        t.m[k] = s.m[perm[k]];
      }
      worst = std::max(worst, std::abs(energy_from_roots(t, EnergyMap{}) - e0) / std::abs(e0));
      worst = std::max(worst, bethe_residual(t).norm());
    }
    ok = ok && worst <= 1e-12;
    parts.push_back(fmt("shuffle %.1e", worst));
  }
  // amplitude of the gaps
  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      GapSeries s;
      double g = 0.5 + u(rng);
      for (int L = 6; L <= 36; L += 3) {
        s.lengths.push_back(L);
        s.gaps.push_back(g);
        g *= 0.5 + 0.45 * u(rng);
      }
      auto a = local_exponent(s);
      double c = std::exp(20.0 * (u(rng) - 0.5));
      for (auto& x : s.gaps) x *= c;
      auto b = local_exponent(s);
      for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k].value - b[k].value));
    }
    ok = ok && worst <= 1e-12;
    parts.push_back(fmt("scale %.1e", worst));
  }
  // BST on a + b L^-omega
  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      double a = -2.0 + u(rng), b = 2.0 * u(rng) - 1.0, omega = 0.5 + 1.5 * u(rng);
      std::vector<double> ls, vs;
      for (int L = 6; L <= 33; L += 3) {
        ls.push_back(L);
        vs.push_back(a + b * std::pow(L, -omega));
      }
      auto t = bst_extrapolate(ls, vs, omega);
      if (t.table.size() < 3) {
        worst = 1e300;
        continue;
      }
      for (double x : t.table[2]) worst = std::max(worst, std::abs(x - a));
      worst = std::max(worst, std::abs(t.limit - a));
    }
    ok = ok && worst <= 1e-10;
    parts.push_back(fmt("BST %.1e", worst));
  }
  // Newton returns to the same fixed point, bit for bit on repeat
  {
    double worst = 0.0;
    bool repeat = true;
    std::normal_distribution<double> g(0.0, 1e-3);
    for (int i = 0; i < 100; ++i) {
      const auto& s = states[i % 3];
      auto start = s;
      for (auto& z : start.z) z += Complex(g(rng), g(rng));
      auto a = newton_bethe(start), b = newton_bethe(start);
      for (int k = 0; k < s.p(); ++k) {
        worst = std::max(worst, std::abs(a.z[k] - s.z[k]));
        repeat = repeat && a.z[k] == b.z[k];
      }
    }
    ok = ok && worst <= 1e-12 && repeat;
    parts.push_back(fmt("Newton %.1e%s", worst, repeat ? "" : " (repeat differs)"));
  }
  std::string detail = "100 cases each:";
  for (auto& p : parts) detail += " " + p + ";";
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance run"};
  std::vector<int> only;
  std::string out_dir = "acceptance_output";
  app.add_option("--criterion", only, "run only these criteria")->check(CLI::Range(1, 7));
  app.add_option("--output-dir", out_dir, "where curve CSVs go");
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::function<Outcome()>> criteria{
      {1, generator_validity},
      {2, integrability},
      {3, oracle_equivalence},
      {4, table_reproduction},
      {5, exponent},
      {6, [&] { return root_pattern(out_dir); }},
      {7, properties},
  };
  bool all = true;
  for (auto& [n, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end()) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s: %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
