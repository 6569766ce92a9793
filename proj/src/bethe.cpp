#include "tasep/bethe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <iomanip>
#include <sstream>

#include <Eigen/LU>

#include "tasep/errors.hpp"
#include "tasep/spectra.hpp"

namespace tasep {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

double inf_norm(const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

bool near(Complex a, Complex b) { return std::abs(a - b) <= 1e-14 * (1.0 + std::abs(a) + std::abs(b)); }

void check_regular(const BetheRootSet& s) {
  const int p = s.p(), r = s.r();
  auto fail = [](const std::string& what) { throw DomainError("singular Bethe roots: " + what); };
  for (int k = 0; k < p; ++k) {
    if (!std::isfinite(s.z[k].real()) || !std::isfinite(s.z[k].imag())) fail("Z_" + std::to_string(k) + " not finite");
    if (near(s.z[k], 0.0)) fail("Z_" + std::to_string(k) + " = 0");
    if (near(s.z[k], 1.0)) fail("Z_" + std::to_string(k) + " = 1");
    for (int t = 0; t < k; ++t)
      if (near(s.z[k], s.z[t])) fail("Z_" + std::to_string(t) + " = Z_" + std::to_string(k));
  }
  for (int j = 0; j < r; ++j) {
    if (!std::isfinite(s.y[j].real()) || !std::isfinite(s.y[j].imag())) fail("Y_" + std::to_string(j) + " not finite");
    if (near(s.y[j], 0.0)) fail("Y_" + std::to_string(j) + " = 0");
    for (int t = 0; t < j; ++t)
      if (near(s.y[j], s.y[t])) fail("Y_" + std::to_string(t) + " = Y_" + std::to_string(j));
    for (int k = 0; k < p; ++k)
      if (near(s.y[j], s.z[k])) fail("Y_" + std::to_string(j) + " = Z_" + std::to_string(k));
  }
}

void check_shape(const BetheRootSet& s) {
  if (s.length < 1) throw DomainError("Bethe root set needs L >= 1");
  if (static_cast<int>(s.m.size()) != s.p() || static_cast<int>(s.n.size()) != s.r())
    throw DomainError("branch numbers do not match the root counts");
  for (int v : s.m)
    if (((v - (s.p() - 1)) % 2) != 0) throw DomainError("first-level doubled numbers must have the parity of p-1");
  for (int v : s.n)
    if (((v - (s.r() - 1)) % 2) != 0) throw DomainError("second-level doubled numbers must have the parity of r-1");
}

void sort_by_argument(BetheRootSet& s) {
  auto sort_pairs = [](std::vector<Complex>& v, std::vector<int>& labels) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::arg(v[a]) < std::arg(v[b]); });
    std::vector<Complex> v2;
    std::vector<int> l2;
    for (auto i : idx) {
      v2.push_back(v[i]);
      l2.push_back(labels[i]);
    }
    v = v2;
    labels = l2;
  };
  sort_pairs(s.z, s.m);
  sort_pairs(s.y, s.n);
}

Complex g_func(Complex z) { return std::log(z / (z - 1.0)); }

}  // namespace

std::vector<Complex> BetheRootSet::lambda() const {
  std::vector<Complex> out;
  for (Complex v : z) out.push_back(0.5 * std::log(v));
  return out;
}

std::vector<Complex> BetheRootSet::big_lambda() const {
  std::vector<Complex> out;
  for (Complex v : y) out.push_back(0.5 * std::log(v));
  return out;
}

std::vector<int> BetheRootSet::shifted_integers() const {
  std::vector<int> out;
  for (int v : m) out.push_back((v - (p() - 1)) / 2);
  return out;
}

std::vector<int> gap_state_integers(int p) {
  if (p < 1) throw DomainError("p must be >= 1");
  std::vector<int> out;
  for (int i = 0; i < p - 1; ++i) out.push_back(p - 1 - 2 * i);
  out.push_back(-(p + 1));
  return out;
}

Eigen::VectorXcd bethe_residual(const BetheRootSet& s) { return bethe_residual(s, s.length); }

Eigen::VectorXcd bethe_residual(const BetheRootSet& s, double length) {
  check_shape(s);
  check_regular(s);
  const int p = s.p(), r = s.r();
  Eigen::VectorXcd f(p + r);
  std::vector<Complex> lz(p), ly(r);
  for (int k = 0; k < p; ++k) lz[k] = std::log(s.z[k]);
  for (int j = 0; j < r; ++j) ly[j] = std::log(s.y[j]);
  for (int k = 0; k < p; ++k) {
    Complex v = length * g_func(s.z[k]);
    for (int t = 0; t < p; ++t)
      if (t != k) v -= lz[k] - lz[t];
    for (int j = 0; j < r; ++j) v -= ly[j] - std::log(s.y[j] - s.z[k]);
    f(k) = v - kI * kPi * static_cast<double>(s.m[k]);
  }
  for (int j = 0; j < r; ++j) {
    Complex v = 0.0;
    for (int k = 0; k < p; ++k) v += ly[j] - std::log(s.y[j] - s.z[k]);
    for (int t = 0; t < r; ++t)
      if (t != j) v -= ly[j] - ly[t];
    f(p + j) = v - kI * kPi * static_cast<double>(s.n[j]);
  }
  return f;
}

Eigen::MatrixXcd bethe_jacobian(const BetheRootSet& s, double length) {
  check_shape(s);
  check_regular(s);
  const int p = s.p(), r = s.r();
  Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(p + r, p + r);
  for (int k = 0; k < p; ++k) {
    const Complex zk = s.z[k];
    Complex d = -length / (zk * (zk - 1.0)) - static_cast<double>(p - 1) / zk;
    for (int j = 0; j < r; ++j) {
      d -= 1.0 / (s.y[j] - zk);
      jac(k, p + j) = -(1.0 / s.y[j] - 1.0 / (s.y[j] - zk));
    }
    jac(k, k) = d;
    for (int t = 0; t < p; ++t)
      if (t != k) jac(k, t) = 1.0 / s.z[t];
  }
  for (int j = 0; j < r; ++j) {
    const Complex yj = s.y[j];
    Complex d = -static_cast<double>(r - 1) / yj;
    for (int k = 0; k < p; ++k) {
      d += 1.0 / yj - 1.0 / (yj - s.z[k]);
      jac(p + j, k) = 1.0 / (yj - s.z[k]);
    }
    jac(p + j, p + j) = d;
    for (int t = 0; t < r; ++t)
      if (t != j) jac(p + j, p + t) = 1.0 / s.y[t];
  }
  return jac;
}

Eigen::VectorXd product_form_mismatch(const BetheRootSet& s) {
  check_shape(s);
  check_regular(s);
  const int p = s.p(), r = s.r();
  Eigen::VectorXd out(p + r);
  auto rel = [](Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
  for (int k = 0; k < p; ++k) {
    Complex lhs = std::pow(s.z[k] / (s.z[k] - 1.0), s.length);
    Complex rhs = (p - 1) % 2 ? -1.0 : 1.0;
    for (int t = 0; t < p; ++t)
      if (t != k) rhs *= s.z[k] / s.z[t];
    for (int j = 0; j < r; ++j) rhs *= s.y[j] / (s.y[j] - s.z[k]);
    out(k) = rel(lhs, rhs);
  }
  for (int j = 0; j < r; ++j) {
    Complex lhs = 1.0;
    for (int k = 0; k < p; ++k) lhs *= s.y[j] / (s.y[j] - s.z[k]);
    Complex rhs = (r - 1) % 2 ? -1.0 : 1.0;
    for (int t = 0; t < r; ++t)
      if (t != j) rhs *= s.y[j] / s.y[t];
    out(p + j) = rel(lhs, rhs);
  }
  return out;
}

BetheRootSet newton_bethe(BetheRootSet s, const SolveOptions& opt, double length) {
  check_shape(s);
  const double len = length > 0.0 ? length : s.length;
  const int p = s.p(), r = s.r();
  auto pack = [&](const BetheRootSet& x) {
    Eigen::VectorXcd v(p + r);
    for (int k = 0; k < p; ++k) v(k) = x.z[k];
    for (int j = 0; j < r; ++j) v(p + j) = x.y[j];
    return v;
  };
  auto unpack = [&](const Eigen::VectorXcd& v, BetheRootSet& x) {
    for (int k = 0; k < p; ++k) x.z[k] = v(k);
    for (int j = 0; j < r; ++j) x.y[j] = v(p + j);
  };
  Eigen::VectorXcd f = bethe_residual(s, len);
  double norm = inf_norm(f);
  std::ostringstream trace;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    if (norm <= opt.tolerance) {
      s.residual_norm = norm;
      s.iterations = it;
      sort_by_argument(s);
      return s;
    }
    if (it == opt.max_iterations) break;
    Eigen::VectorXcd x = pack(s);
    Eigen::VectorXcd dx = bethe_jacobian(s, len).fullPivLu().solve(-f);
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, step *= 0.5) {
      BetheRootSet trial = s;
      unpack(x + step * dx, trial);
      try {
        Eigen::VectorXcd ft = bethe_residual(trial, len);
        double nt = inf_norm(ft);
        if (std::isfinite(nt) && nt < norm) {
          s = std::move(trial);
          f = ft;
          norm = nt;
          accepted = true;
          break;
        }
      } catch (const DomainError&) {
        // root collision or Z = 1: shrink the step
      }
    }
    trace << " " << std::scientific << std::setprecision(2) << norm;
    if (!accepted) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", norm);
      throw NumericalError(std::string("Newton stalled at residual ") + buf + "; trace:" + trace.str());
    }
  }
  throw NumericalError("Newton did not reach tolerance in " + std::to_string(opt.max_iterations) +
                       " iterations; trace:" + trace.str());
}

namespace {

// Decoupled form of the r = 0 equations: with S = sum_s Log Z_s every root
// solves psi(Z_k) = i pi m_k - S, psi(Z) = L Log(Z/(Z-1)) - p Log Z.
struct Decoupled {
  double length;
  int p;

  Complex psi(Complex z) const { return length * g_func(z) - static_cast<double>(p) * std::log(z); }
  Complex dpsi(Complex z) const { return -length / (z * (z - 1.0)) - static_cast<double>(p) / z; }

  Complex root(Complex target, Complex z) const {
    for (int it = 0; it < 60; ++it) {
      Complex f = psi(z) - target;
      Complex d = -f / dpsi(z);
      double lam = 1.0;
      Complex zn = z + d;
      for (int h = 0; h < 30; ++h, lam *= 0.5) {
        zn = z + lam * d;
        if (std::abs(psi(zn) - target) < std::abs(f)) break;
      }
      z = zn;
      if (std::abs(lam * d) < 1e-15 * std::abs(z)) break;
    }
    return z;
  }

  std::vector<Complex> solve(Complex s, std::vector<Complex> z, const std::vector<int>& m) const {
    auto update = [&](Complex sv) {
      for (int k = 0; k < p; ++k) z[k] = root(kI * kPi * static_cast<double>(m[k]) - sv, z[k]);
    };
    for (int it = 0; it < 60; ++it) {
      update(s);
      Complex f = s, df = 1.0;
      for (int k = 0; k < p; ++k) {
        f -= std::log(z[k]);
        df += 1.0 / (z[k] * dpsi(z[k]));
      }
      Complex ds = -f / df;
      s += ds;
      if (std::abs(ds) < 1e-15 * std::max(1.0, std::abs(s))) break;
    }
    update(s);
    return z;
  }
};

bool plausible(const BetheRootSet& s) {
  for (Complex v : s.z)
    if (!(std::abs(v) < 1e8)) return false;
  for (Complex v : s.y)
    if (!(std::abs(v) < 1e8)) return false;
  const double sep = 1e-8;
  for (int k = 0; k < s.p(); ++k) {
    if (std::abs(s.z[k] - 1.0) < sep || std::abs(s.z[k]) < sep) return false;
    for (int t = 0; t < k; ++t)
      if (std::abs(s.z[k] - s.z[t]) < sep) return false;
    for (Complex y : s.y)
      if (std::abs(y - s.z[k]) < sep) return false;
  }
  for (int j = 0; j < s.r(); ++j)
    for (int t = 0; t < j; ++t)
      if (std::abs(s.y[j] - s.y[t]) < sep) return false;
  return true;
}

Complex log_sum(const std::vector<Complex>& z) {
  Complex s = 0.0;
  for (Complex v : z) s += std::log(v);
  return s;
}

BetheRootSet decoupled_then_newton(int length, const std::vector<int>& m, std::vector<Complex> seed, Complex s0,
                                   const SolveOptions& opt) {
  Decoupled dec{static_cast<double>(length), static_cast<int>(m.size())};
  BetheRootSet out;
  out.length = length;
  out.m = m;
  out.z = dec.solve(s0, std::move(seed), m);
  if (!plausible(out)) throw NumericalError("decoupled iteration produced a degenerate root set");
  out = newton_bethe(out, opt);
  if (!plausible(out)) throw NumericalError("Newton converged to a degenerate root set");
  return out;
}

}  // namespace

BetheRootSet solve_bethe(int length, int p, int r, const std::vector<int>& m, const std::vector<int>& n,
                         const std::optional<BetheRootSet>& seed, const SolveOptions& opt) {
  if (p < 1) throw DomainError("solve_bethe needs p >= 1");
  if (r < 0 || r > p) throw DomainError("second-level count r must lie in [0, p]");
  if (static_cast<int>(m.size()) != p || static_cast<int>(n.size()) != r)
    throw DomainError("branch-number lists must have p and r entries");
  if (seed) {
    if (seed->p() != p || seed->r() != r) throw DomainError("seed root counts do not match (p, r)");
    BetheRootSet start = *seed;
    start.length = length;
    start.m = m;
    start.n = n;
    BetheRootSet out = newton_bethe(start, opt);
    if (!plausible(out)) throw NumericalError("Newton from the seed converged to a degenerate root set");
    return out;
  }
  if (length > 9) throw DomainError("multistart without seed roots is limited to L <= 9");

  BetheRootSet probe;
  probe.length = length;
  probe.z.assign(p, 2.0);
  probe.y.assign(r, 3.0);
  probe.m = m;
  probe.n = n;
  check_shape(probe);

  // labels in decreasing order are placed at increasing argument
  std::vector<int> order_z(p), order_y(r);
  std::iota(order_z.begin(), order_z.end(), 0);
  std::iota(order_y.begin(), order_y.end(), 0);
  std::sort(order_z.begin(), order_z.end(), [&](int a, int b) { return m[a] > m[b]; });
  std::sort(order_y.begin(), order_y.end(), [&](int a, int b) { return n[a] > n[b]; });

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::string last_error = "no attempt";
  for (double radius : {0.5, 1.0, 2.0}) {
    for (int trial = 0; trial <= opt.jitter_trials; ++trial) {
      for (int orientation : {1, -1}) {
        BetheRootSet start = probe;
        const double jitter = trial == 0 ? 0.0 : 0.15 * radius;
        for (int rank = 0; rank < p; ++rank) {
          double angle = orientation * (-kPi + 2.0 * kPi * (rank + 0.5) / p);
          start.z[order_z[rank]] = std::polar(radius, angle) + jitter * Complex(unit(rng), unit(rng));
        }
        for (int rank = 0; rank < r; ++rank) {
          double angle = orientation * (-kPi + 2.0 * kPi * (rank + 0.25) / r);
          start.y[order_y[rank]] = std::polar(1.7 * radius, angle) + jitter * Complex(unit(rng), unit(rng));
        }
        try {
          BetheRootSet out;
          if (r == 0)
            out = decoupled_then_newton(length, m, start.z, log_sum(start.z), opt);
          else
            out = newton_bethe(start, opt);
          if (plausible(out)) return out;
          last_error = "degenerate solution";
        } catch (const std::exception& e) {
          last_error = e.what();
        }
      }
    }
  }
  throw NumericalError("multistart exhausted for L=" + std::to_string(length) + ", p=" + std::to_string(p) +
                       ", r=" + std::to_string(r) + "; last failure: " + last_error.substr(0, 200));
}

namespace {

std::vector<Complex> nearest_label_seeds(const BetheRootSet& roots, const std::vector<int>& target_m) {
  const int p_old = roots.p(), p_new = static_cast<int>(target_m.size());
  std::vector<Complex> seeds;
  for (int v : target_m) {
    double t = static_cast<double>(v) / p_new;
    int best = 0;
    for (int k = 1; k < p_old; ++k)
      if (std::abs(static_cast<double>(roots.m[k]) / p_old - t) <
          std::abs(static_cast<double>(roots.m[best]) / p_old - t))
        best = k;
    seeds.push_back(roots.z[best]);
  }
  return seeds;
}

BetheRootSet homotopy(const BetheRootSet& roots, int target, const std::vector<int>& target_m,
                      const ContinuationOptions& opt) {
  std::string last = "not attempted";
  for (int steps = std::max(1, opt.homotopy_steps); steps <= 64; steps *= 2) {
    try {
      BetheRootSet cur;
      cur.length = target;
      cur.m = target_m;
      cur.z = nearest_label_seeds(roots, target_m);
      // roots with equal seeds are split along the curve
      for (std::size_t k = 0; k < cur.z.size(); ++k)
        for (std::size_t t = 0; t < k; ++t)
          if (cur.z[k] == cur.z[t]) cur.z[k] *= std::polar(1.0, -0.05 * (k - t));
      const double span = target - roots.length;
      for (int s = 1; s <= steps; ++s) {
        double len = roots.length + span * s / steps;
        cur = newton_bethe(cur, opt.solve, len);
      }
      cur.length = target;
      cur = newton_bethe(cur, opt.solve);
      if (plausible(cur)) return cur;
      last = "degenerate solution";
    } catch (const std::exception& e) {
      last = e.what();
    }
  }
  throw NumericalError("homotopy in L failed for target L=" + std::to_string(target) + ": " + last.substr(0, 200));
}

BetheRootSet continue_with_guess(const BetheRootSet& roots, int target, const std::vector<int>& target_m,
                                 Complex s_guess, const ContinuationOptions& opt, ContinuationInfo* info) {
  if (roots.r() != 0) throw DomainError("continuation is implemented for r = 0");
  if (target <= roots.length) throw DomainError("continuation target must exceed the current L");
  if (info) info->used_homotopy = false;
  BetheRootSet out;
  if (!opt.force_homotopy) {
    try {
      out = decoupled_then_newton(target, target_m, nearest_label_seeds(roots, target_m), s_guess, opt.solve);
    } catch (const NumericalError&) {
      out = BetheRootSet{};
    }
  }
  if (out.p() == 0) {
    if (info) info->used_homotopy = true;
    out = homotopy(roots, target, target_m, opt);
  }
  for (const auto& c : counting_check(out))
    if (c.residual > 1e-10) throw NumericalError("continued solution left its branch at root " + std::to_string(c.index));
  return out;
}

}  // namespace

BetheRootSet continue_in_L(const BetheRootSet& roots, int target_length, const ContinuationOptions& opt,
                           ContinuationInfo* info) {
  const int p = roots.p();
  std::vector<int> sorted = roots.m;
  std::sort(sorted.rbegin(), sorted.rend());
  std::vector<int> pattern = gap_state_integers(p);
  std::vector<int> target;
  if (sorted == pattern) {
    target = gap_state_integers(p + 1);
  } else {
    std::vector<int> neg = pattern;
    for (int& v : neg) v = -v;
    std::sort(neg.rbegin(), neg.rend());
    if (sorted != neg)
      throw DomainError("no default branch numbers for this state; pass the target numbers explicitly");
    target = gap_state_integers(p + 1);
    for (int& v : target) v = -v;
  }
  return continue_in_L(roots, target_length, target, opt, info);
}

BetheRootSet continue_in_L(const BetheRootSet& roots, int target_length, const std::vector<int>& target_m,
                           const ContinuationOptions& opt, ContinuationInfo* info) {
  if (target_length != roots.length + 3) throw DomainError("continuation steps are L -> L + 3");
  if (roots.length % 3 != 0 || roots.p() != roots.length / 3 || static_cast<int>(target_m.size()) != roots.p() + 1)
    throw DomainError("continuation stays in the sector p = L/3, r = 0");
  Complex s_guess = opt.log_sum_guess.value_or(log_sum(roots.z) * (static_cast<double>(target_length) / roots.length));
  return continue_with_guess(roots, target_length, target_m, s_guess, opt, info);
}

std::vector<BetheRootSet> gap_state_chain(int max_length, const ContinuationOptions& opt,
                                          const std::function<void(const BetheRootSet&)>& on_state) {
  if (max_length < 6) throw DomainError("the chain starts at L = 6");
  std::vector<BetheRootSet> chain;
  chain.push_back(solve_bethe(6, 2, 0, gap_state_integers(2), {}, std::nullopt, opt.solve));
  if (on_state) on_state(chain.back());
  std::vector<Complex> history{log_sum(chain.back().z)};
  for (int len = 9; len <= max_length; len += 3) {
    ContinuationOptions step = opt;
    // linear extrapolation of the log sum once two sizes are known
    if (history.size() >= 2) step.log_sum_guess = 2.0 * history.back() - history[history.size() - 2];
    try {
      chain.push_back(continue_in_L(chain.back(), len, gap_state_integers(len / 3), step));
    } catch (const NumericalError& e) {
      throw NumericalError("gap-state chain failed at L=" + std::to_string(len) + ": " + e.what());
    }
    if (on_state) on_state(chain.back());
    history.push_back(log_sum(chain.back().z));
  }
  return chain;
}

Complex energy_raw(const BetheRootSet& roots) {
  Complex e = static_cast<double>(roots.length);
  for (int k = 0; k < roots.p(); ++k) {
    if (near(roots.z[k], 1.0)) throw DomainError("energy undefined: Z_" + std::to_string(k) + " = 1");
    e += 2.0 * roots.z[k] / (roots.z[k] - 1.0);
  }
  return e;
}

Complex energy_from_roots(const BetheRootSet& roots, const EnergyMap& map) {
  return map.scale * energy_raw(roots) + map.offset(roots.length, roots.p());
}

namespace {

void combinations(const std::vector<int>& pool, int k, std::size_t start, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < pool.size(); ++i) {
    cur.push_back(pool[i]);
    combinations(pool, k, i + 1, cur, out);
    cur.pop_back();
  }
}

struct StateSample {
  std::vector<int> m;
  Complex raw;
};

std::vector<StateSample> regular_states(int length, int p, const SolveOptions& opt, int& tried) {
  std::vector<int> pool;
  for (int v = -(length + p); v <= length + p; ++v)
    if (((v - (p - 1)) % 2) == 0) pool.push_back(v);
  std::vector<std::vector<int>> sets;
  std::vector<int> cur;
  combinations(pool, p, 0, cur, sets);
  SolveOptions quick = opt;
  quick.jitter_trials = std::min(opt.jitter_trials, 2);
  std::vector<StateSample> out;
  for (auto& m : sets) {
    std::sort(m.rbegin(), m.rend());
    ++tried;
    try {
      BetheRootSet s = solve_bethe(length, p, 0, m, {}, std::nullopt, quick);
      Complex raw = energy_raw(s);
      bool dup = std::any_of(out.begin(), out.end(), [&](const StateSample& x) { return std::abs(x.raw - raw) < 1e-9; });
      if (!dup) out.push_back({m, raw});
    } catch (const std::exception&) {
      // branch numbers without a regular solution
    }
  }
  return out;
}

struct OffsetFit {
  Complex offset;
  int count = 0;
  std::vector<CalibrationMatch> matches;
};

std::vector<OffsetFit> offset_candidates(const std::vector<StateSample>& states, const std::vector<Complex>& eig,
                                         double scale, double tol) {
  std::vector<Complex> sorted = eig;
  sort_spectrum(sorted);
  auto find = [&](Complex target) -> std::optional<Complex> {
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), target.real() - tol,
                               [](Complex a, double v) { return a.real() < v; });
    for (auto it = lo; it != sorted.end() && it->real() <= target.real() + tol; ++it)
      if (std::abs(*it - target) <= tol) return *it;
    return std::nullopt;
  };
  std::vector<OffsetFit> fits;
  for (const auto& anchor : states)
    for (Complex lam : eig) {
      Complex o = lam - scale * anchor.raw;
      bool seen = std::any_of(fits.begin(), fits.end(), [&](const OffsetFit& f) { return std::abs(f.offset - o) <= tol; });
      if (seen) continue;
      OffsetFit fit{o, 0, {}};
      for (const auto& s : states)
        if (auto hit = find(scale * s.raw + o)) {
          ++fit.count;
          fit.matches.push_back({s.m, s.raw, *hit});
        }
      if (fit.count >= 2) fits.push_back(std::move(fit));
    }
  std::sort(fits.begin(), fits.end(), [](const OffsetFit& a, const OffsetFit& b) { return a.count > b.count; });
  return fits;
}

}  // namespace

CalibrationReport calibrate_energy_map(int length, const SolveOptions& opt) {
  if (length != 6 && length != 9) throw DomainError("energy-map calibration runs at L = 6 or L = 9");
  const double tol = 1e-9;
  const std::array<int, 2> ps{1, length / 3};
  CalibrationReport report;
  std::array<std::vector<StateSample>, 2> states;
  std::array<std::vector<Complex>, 2> spectra;
  for (int i = 0; i < 2; ++i) {
    states[i] = regular_states(length, ps[i], opt, report.states_tried);
    spectra[i] = dense_spectrum(build_hamiltonian_tasep(Sector{length, length - ps[i], ps[i], std::nullopt})).eigenvalues;
  }

  struct Candidate {
    double scale;
    OffsetFit fit[2];
    int score;
  };
  std::vector<Candidate> candidates;
  for (double scale : {1.0, -1.0, 2.0, -2.0, 0.5, -0.5}) {
    auto f0 = offset_candidates(states[0], spectra[0], scale, tol);
    auto f1 = offset_candidates(states[1], spectra[1], scale, tol);
    for (const auto& a : f0)
      for (const auto& b : f1) candidates.push_back({scale, {a, b}, a.count + b.count});
  }
  if (candidates.empty()) throw NumericalError("no consistent (scale, offset) matches two Bethe states to ED");
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  const Candidate& best = candidates.front();
  report.runner_up_count = candidates.size() > 1 ? candidates[1].score : 0;
  if (report.runner_up_count == best.score) {
    std::ostringstream msg;
    msg << "ambiguous energy map; candidates:";
    for (const auto& c : candidates) {
      if (c.score != best.score) break;
      msg << " (scale " << c.scale << ", offsets " << c.fit[0].offset << " " << c.fit[1].offset << ")";
    }
    throw DomainError(msg.str());
  }
  const Complex o1 = best.fit[0].offset, op = best.fit[1].offset;
  if (std::abs(o1.imag()) > tol || std::abs(op.imag()) > tol)
    throw NumericalError("calibrated offsets are not real");
  const double b = (op.real() - o1.real()) / (ps[1] - ps[0]);
  const double a = (o1.real() - b * ps[0]) / length;
  report.map = EnergyMap{best.scale, a, b, length};
  for (int i = 0; i < 2; ++i)
    for (const auto& m : best.fit[i].matches) report.matches.push_back(m);
  for (const auto& m : report.matches)
    if (std::abs(m.eigenvalue) <= tol) report.steady_state_regular = true;
  return report;
}

Complex counting_function(const BetheRootSet& s, Complex z) {
  Complex v = g_func(z);
  const Complex lz = std::log(z);
  for (Complex zl : s.z) v -= (lz - std::log(zl)) / static_cast<double>(s.length);
  for (Complex y : s.y) v -= (std::log(y) - std::log(y - z)) / static_cast<double>(s.length);
  return -kI * v;
}

std::vector<CountingEntry> counting_check(const BetheRootSet& s) {
  check_shape(s);
  std::vector<CountingEntry> out;
  for (int k = 0; k < s.p(); ++k) {
    Complex val = counting_function(s, s.z[k]);
    int doubled = static_cast<int>(std::lround(val.real() * s.length / kPi));
    double res = std::abs(val - kPi * static_cast<double>(s.m[k]) / s.length);
    out.push_back({k, doubled, val, res});
  }
  return out;
}

double conjugation_defect(const BetheRootSet& s) {
  double worst = 0.0;
  auto scan = [&](const std::vector<Complex>& v) {
    for (Complex a : v) {
      double best = std::numeric_limits<double>::infinity();
      for (Complex b : v) best = std::min(best, std::abs(std::conj(a) - b));
      worst = std::max(worst, best);
    }
  };
  scan(s.z);
  scan(s.y);
  return worst;
}

BetheRootSet conjugate_state(const BetheRootSet& s) {
  BetheRootSet c = s;
  for (auto& v : c.z) v = std::conj(v);
  for (auto& v : c.y) v = std::conj(v);
  for (auto& v : c.m) v = -v;
  for (auto& v : c.n) v = -v;
  sort_by_argument(c);
  return c;
}

}  // namespace tasep
