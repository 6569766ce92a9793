// Command-line driver: diag, bethe, scale, check.
// Exit codes: 0 ok, 2 domain error, 3 numerical failure, 4 I/O.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tasep/bethe.hpp"
#include "tasep/errors.hpp"
#include "tasep/format.hpp"
#include "tasep/scaling.hpp"
#include "tasep/spectra.hpp"
#include "tasep/yangbaxter.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tasep;

namespace {

struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir;
  bool force = false;
  std::string format = "json";

  int length = 6;
  int n_a = -1;
  int n_b = -1;
  int momentum = -1;
  bool dense = false;
  bool krylov = false;
  bool write_spectrum = false;
  double zero_tol = 1e-10;

  std::vector<int> integers;
  std::string from_file;
  double tolerance = 1e-13;

  int from = 6;
  int to = 33;
  std::vector<double> omegas{0.5, 1.0, 1.5, 2.0};

  bool yang_baxter = false;
  bool transfer = false;
  bool all = false;
  int triples = 100;
};

json config_json(const RunConfig& c, const std::string& command) {
  json j;
  j["command"] = command;
  j["seed"] = c.seed;
  j["format"] = c.format;
  if (command == "diag") {
    j["length"] = c.length;
    j["na"] = c.n_a;
    j["nb"] = c.n_b;
    j["momentum"] = c.momentum < 0 ? json(nullptr) : json(c.momentum);
    j["krylov"] = c.krylov;
    j["zero_tol"] = c.zero_tol;
  } else if (command == "bethe") {
    j["length"] = c.length;
    j["integers"] = c.integers;
    j["from_file"] = c.from_file;
    j["tolerance"] = c.tolerance;
  } else if (command == "scale") {
    j["from"] = c.from;
    j["to"] = c.to;
    j["omega"] = c.omegas;
    j["tolerance"] = c.tolerance;
  } else if (command == "check") {
    j["yang_baxter"] = c.yang_baxter || c.all;
    j["transfer_hamiltonian"] = c.transfer || c.all;
    j["length"] = c.length;
    j["triples"] = c.triples;
  }
  return j;
}

class Output {
 public:
  Output(const RunConfig& c) : force_(c.force) {
    std::string dir = c.output_dir;
    if (dir.empty()) {
      const char* env = std::getenv("TASEP_OUTPUT_DIR");
      dir = env && *env ? env : ".";
    }
    dir_ = dir;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot use output directory " + dir_.string());
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  std::ofstream open(const std::string& name) const {
    fs::path p = path(name);
    if (fs::exists(p) && !force_) throw IoError("refusing to overwrite " + p.string() + " (use --force)");
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
  }

  void write(const std::string& name, const std::string& content) const {
    auto out = open(name);
    out << content;
    if (!out) throw IoError("write failed for " + path(name).string());
  }

  // all names are checked before anything is written
  void reserve(const std::vector<std::string>& names) const {
    for (const auto& n : names)
      if (fs::exists(path(n)) && !force_) throw IoError("refusing to overwrite " + path(n).string() + " (use --force)");
  }

 private:
  fs::path dir_;
  bool force_;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_diag(const RunConfig& c) {
  if (c.n_a < 0 || c.n_b < 0) throw DomainError("diag needs --na and --nb");
  if (c.dense && c.krylov) throw DomainError("choose one of --dense and --krylov");
  Output out(c);
  Sector s{c.length, c.n_a, c.n_b, std::nullopt};
  SectorGenerator gen = build_hamiltonian_tasep(s);
  std::string stem = "diag_L" + std::to_string(c.length) + "_" + std::to_string(c.n_a) + "_" + std::to_string(c.n_b);
  if (c.momentum >= 0) {
    gen = project_momentum(gen, c.momentum);
    stem += "_k" + std::to_string(c.momentum);
  }
  DenseOptions dopt;
  dopt.zero_tol = c.zero_tol;
  bool use_krylov = c.krylov || (!c.dense && gen.dimension() > dopt.dense_limit);
  const std::string report = stem + (c.format == "csv" ? ".csv" : ".json");
  std::vector<std::string> names{report};
  if (c.write_spectrum) names.push_back(stem + "_spectrum.txt");
  out.reserve(names);

  SpectrumResult r;
  if (use_krylov) {
    KrylovOptions kopt;
    kopt.zero_tol = c.zero_tol;
    r = krylov_gap(gen, c.seed, kopt);
  } else {
    r = dense_spectrum(gen, dopt);
  }
  json j = spectrum_summary(r);
  j["dimension"] = gen.dimension();
  j["ergodic"] = is_ergodic(gen);
  j["config"] = config_json(c, "diag");
  if (c.format == "csv") {
    std::string csv = "L,n_A,n_B,k,gap_re,gap_im,method\n";
    csv += std::to_string(c.length) + "," + std::to_string(c.n_a) + "," + std::to_string(c.n_b) + "," +
           (c.momentum >= 0 ? std::to_string(c.momentum) : "") + "," +
           (r.gap ? format_double(r.gap->real()) : "") + "," + (r.gap ? format_double(r.gap->imag()) : "") + "," +
           to_string(r.method) + "\n";
    out.write(report, csv);
    std::cout << csv;
  } else {
    out.write(report, dump(j));
    std::cout << dump(j);
  }
  if (c.write_spectrum) {
    std::ostringstream sp;
    write_spectrum_text(sp, r.eigenvalues);
    out.write(stem + "_spectrum.txt", sp.str());
  }
  if (!r.gap) std::cerr << "no gap: sector has no eigenvalue with positive real part (frozen dynamics)\n";
  return 0;
}

int cmd_bethe(const RunConfig& c) {
  Output out(c);
  ContinuationOptions opt;
  opt.solve.tolerance = c.tolerance;
  opt.solve.seed = c.seed;
  const int L = c.length;
  if (L < 3 || L % 3 != 0) throw DomainError("bethe works in the p = L/3, r = 0 sector; L must be a multiple of 3");
  const int p = L / 3;
  std::vector<int> m = c.integers.empty() ? gap_state_integers(p) : c.integers;
  if (static_cast<int>(m.size()) != p) throw DomainError("--integers needs exactly L/3 entries");

  const std::string stem = "bethe_L" + std::to_string(L);
  out.reserve({stem + ".json", stem + "_Z.csv", stem + "_lambda.csv"});

  BetheRootSet roots;
  if (!c.from_file.empty()) {
    std::ifstream in(c.from_file);
    if (!in) throw IoError("cannot read " + c.from_file);
    json sj;
    try {
      in >> sj;
    } catch (const json::exception& e) {
      throw IoError(std::string("cannot parse ") + c.from_file + ": " + e.what());
    }
    BetheRootSet seed = root_set_from_json(sj);
    if (seed.length == L) {
      roots = solve_bethe(L, p, 0, m, {}, seed, opt.solve);
    } else if (seed.length + 3 == L) {
      roots = continue_in_L(seed, L, m, opt);
    } else {
      throw DomainError("seed file must hold L or L-3 roots");
    }
  } else if (L <= 9 || !c.integers.empty()) {
    if (L > 9) throw DomainError("custom integers above L = 9 need --from-file seeds");
    roots = solve_bethe(L, p, 0, m, {}, std::nullopt, opt.solve);
  } else {
    roots = gap_state_chain(L, opt).back();
  }

  json j = root_set_json(roots, EnergyMap{});
  j["config"] = config_json(c, "bethe");
  json counting = json::array();
  for (const auto& e : counting_check(roots))
    counting.push_back({{"index", e.index}, {"doubled", e.doubled}, {"residual", e.residual}});
  j["counting"] = counting;
  out.write(stem + ".json", dump(j));
  out.write(stem + "_Z.csv", root_curve_csv(roots, true));
  out.write(stem + "_lambda.csv", root_curve_csv(roots, false));
  std::cout << dump(j);
  return 0;
}

int cmd_scale(const RunConfig& c) {
  Output out(c);
  out.reserve({"scale_gaps.csv", "scale_extrapolants.csv", "scale_report.json"});
  ContinuationOptions opt;
  opt.solve.tolerance = c.tolerance;
  opt.solve.seed = c.seed;
  auto gaps = out.open("scale_gaps.csv");
  gaps << "L,gap_re\n" << std::flush;
  ScalingStudy study;
  try {
    study = run_scaling_study(c.from, c.to, 3, c.omegas, opt, [&](const BetheRootSet& r, double gap) {
      gaps << r.length << "," << format_double(gap) << "\n" << std::flush;
    });
  } catch (const NumericalError&) {
    gaps.close();
    throw;
  }
  gaps.close();
  std::string ex = "L,extrapolant\n";
  for (const auto& e : study.extrapolants) ex += std::to_string(e.length) + "," + format_double(e.value) + "\n";
  out.write("scale_extrapolants.csv", ex);
  json j;
  j["z_estimate"] = study.z_estimate;
  j["error"] = study.error;
  j["omega"] = study.tableau.omega;
  j["table"] = study.tableau.table;
  j["truncated"] = study.tableau.truncated;
  j["extrapolants"] = json::array();
  for (const auto& e : study.extrapolants) j["extrapolants"].push_back({{"L", e.length}, {"value", e.value}});
  j["config"] = config_json(c, "scale");
  out.write("scale_report.json", dump(j));
  std::cout << dump(j);
  return 0;
}

int cmd_check(const RunConfig& c) {
  Output out(c);
  const bool yb = c.yang_baxter || c.all || !c.transfer;
  const bool th = c.transfer || c.all;
  out.reserve({"check.json"});
  json j;
  bool pass = true;
  if (yb) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto draw = [&] {
      for (;;) {
        Complex t(u(rng), u(rng));
        if (std::abs(t) <= 1.0) return t;
      }
    };
    json list = json::array();
    double worst = 0.0;
    for (int i = 0; i < c.triples; ++i) {
      Complex a = draw(), b = draw(), d = draw();
      double res = check_yang_baxter(a, b, d);
      worst = std::max(worst, res);
      list.push_back({{"theta_triple", {{a.real(), a.imag()}, {b.real(), b.imag()}, {d.real(), d.imag()}}},
                      {"residual", res}});
    }
    bool ok = worst <= 1e-12;
    pass = pass && ok;
    j["yang_baxter"] = {{"max_residual", worst}, {"threshold", 1e-12}, {"pass", ok}, {"triples", list}};
  }
  if (th) {
    if (c.length < 2 || c.length > 4) throw DomainError("transfer-Hamiltonian check runs at L = 2, 3 or 4");
    TransferHamiltonian h = hamiltonian_from_transfer(c.length);
    ConventionCalibration cal = calibrate_transfer_convention(h.matrix, build_hamiltonian_tasep(c.length));
    bool ok = cal.discrepancy <= 1e-6;
    pass = pass && ok;
    j["transfer_hamiltonian"] = {{"L", c.length},
                                 {"tau0_is_translation", h.tau0_is_translation},
                                 {"orientation", to_string(cal.orientation)},
                                 {"scale", cal.scale},
                                 {"offset", cal.offset},
                                 {"discrepancy", cal.discrepancy},
                                 {"threshold", 1e-6},
                                 {"pass", ok}};
  }
  j["pass"] = pass;
  j["config"] = config_json(c, "check");
  out.write("check.json", dump(j));
  std::cout << dump(j);
  return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-species TASEP: exact diagonalization, Bethe roots, gap scaling"};
  app.set_config("--config", "", "key = value config file (sections per subcommand)");
  app.require_subcommand(1);
  RunConfig c;
  app.add_option("--seed", c.seed, "RNG seed");
  app.add_option("--output-dir", c.output_dir, "output directory (default $TASEP_OUTPUT_DIR or .)");
  app.add_flag("--force", c.force, "overwrite existing outputs");
  app.add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}));

  auto* diag = app.add_subcommand("diag", "spectrum of a sector generator");
  diag->add_option("--length,-L", c.length, "ring length")->required();
  diag->add_option("--na", c.n_a, "number of A particles")->required();
  diag->add_option("--nb", c.n_b, "number of B particles")->required();
  diag->add_option("--momentum,-k", c.momentum, "momentum block");
  diag->add_flag("--dense", c.dense, "dense eigensolver");
  diag->add_flag("--krylov", c.krylov, "shift-invert Arnoldi");
  diag->add_flag("--spectrum", c.write_spectrum, "also write all eigenvalues");
  diag->add_option("--zero-tol", c.zero_tol, "steady-state tolerance");

  auto* bethe = app.add_subcommand("bethe", "Bethe roots of the p = L/3, r = 0 sector");
  bethe->add_option("--length,-L", c.length, "ring length")->required();
  bethe->add_option("--integers", c.integers, "doubled branch numbers")->delimiter(',');
  bethe->add_option("--from-file", c.from_file, "seed root-set JSON (L or L-3)");
  bethe->add_option("--tolerance", c.tolerance, "Newton residual tolerance");

  auto* scale = app.add_subcommand("scale", "gap series, local exponents and BST");
  scale->add_option("--from", c.from, "first extrapolant size");
  scale->add_option("--to", c.to, "last extrapolant size");
  scale->add_option("--omega", c.omegas, "BST omega candidates")->delimiter(',');
  scale->add_option("--tolerance", c.tolerance, "Newton residual tolerance");

  auto* check = app.add_subcommand("check", "integrability checks");
  check->add_flag("--yang-baxter", c.yang_baxter, "factorization equation on random triples");
  check->add_flag("--transfer-hamiltonian", c.transfer, "log-derivative of the transfer matrix");
  check->add_flag("--all", c.all, "run every check");
  check->add_option("--length,-L", c.length, "ring length for the transfer check")->default_val(3);
  check->add_option("--triples", c.triples, "number of random triples")->default_val(100);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*diag) return cmd_diag(c);
    if (*bethe) return cmd_bethe(c);
    if (*scale) return cmd_scale(c);
    if (*check) return cmd_check(c);
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
