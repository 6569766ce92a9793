#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tasep/lattice.hpp"

namespace tasep {

// Roots are stored in the squared variables Z = e^{2 lambda}, Y = e^{2 Lambda}.
// Branch numbers are doubled: the first-level log equation for root k reads
//   L Log(Z_k/(Z_k-1)) - sum_{s!=k} (Log Z_k - Log Z_s)
//     - sum_j (Log Y_j - Log(Y_j - Z_k)) = i pi m_k,
// with m_k = p-1 (mod 2). m_k/2 is the counting-function value L Y_L / 2pi.
struct BetheRootSet {
  int length = 0;
  std::vector<Complex> z;  // Z_k
  std::vector<Complex> y;  // Y_j
  std::vector<int> m;      // doubled first-level numbers
  std::vector<int> n;      // doubled second-level numbers
  double residual_norm = -1.0;
  int iterations = 0;

  int p() const { return static_cast<int>(z.size()); }
  int r() const { return static_cast<int>(y.size()); }
  std::vector<Complex> lambda() const;  // principal branch, Log(Z)/2
  std::vector<Complex> big_lambda() const;
  // Integer shift relative to the (p-1) parity term: (m_k - (p-1)) / 2.
  std::vector<int> shifted_integers() const;
};

// {p-1, p-3, ..., 3-p, -(p+1)}: the branch numbers of the first excited
// state in the sector r = 0, p = L/3. Negating them gives the conjugate state.
std::vector<int> gap_state_integers(int p);

Eigen::VectorXcd bethe_residual(const BetheRootSet& roots);
Eigen::VectorXcd bethe_residual(const BetheRootSet& roots, double length);
Eigen::MatrixXcd bethe_jacobian(const BetheRootSet& roots, double length);

// Relative mismatch of the two sides of the exponentiated (product) equations,
// p entries followed by r entries.
Eigen::VectorXd product_form_mismatch(const BetheRootSet& roots);

struct SolveOptions {
  double tolerance = 1e-13;
  int max_iterations = 100;
  int max_halvings = 30;
  std::uint64_t seed = 20240611;
  int jitter_trials = 6;  // random draws per radius in the multistart
};

// Newton on the log form from `start` (sizes and branch numbers taken from it).
BetheRootSet newton_bethe(BetheRootSet start, const SolveOptions& opt = {}, double length = 0.0);

BetheRootSet solve_bethe(int length, int p, int r, const std::vector<int>& m, const std::vector<int>& n,
                         const std::optional<BetheRootSet>& seed = std::nullopt, const SolveOptions& opt = {});

struct ContinuationOptions {
  SolveOptions solve;
  bool force_homotopy = false;
  int homotopy_steps = 8;
  // Guess for sum_k Log Z_k at the target size; default scales the current sum.
  std::optional<Complex> log_sum_guess;
};

struct ContinuationInfo {
  bool used_homotopy = false;
};

// One step L -> L + 3 in the sector r = 0, p = L/3.
BetheRootSet continue_in_L(const BetheRootSet& roots, int target_length, const ContinuationOptions& opt = {},
                           ContinuationInfo* info = nullptr);
BetheRootSet continue_in_L(const BetheRootSet& roots, int target_length, const std::vector<int>& target_m,
                           const ContinuationOptions& opt = {}, ContinuationInfo* info = nullptr);

// First excited state of the p = L/3, r = 0 sector for L = 6, 9, ..., max_length.
// `on_state` sees each root set as soon as it converges.
std::vector<BetheRootSet> gap_state_chain(int max_length, const ContinuationOptions& opt = {},
                                          const std::function<void(const BetheRootSet&)>& on_state = {});

Complex energy_raw(const BetheRootSet& roots);  // L + sum 2Z/(Z-1)

// E_H = scale * E_raw + site_offset * L + root_offset * p.
struct EnergyMap {
  double scale = -0.5;
  double site_offset = 0.5;
  double root_offset = 1.0;
  int calibrated_at = 0;

  double offset(int length, int p) const { return site_offset * length + root_offset * p; }
};

Complex energy_from_roots(const BetheRootSet& roots, const EnergyMap& map);

struct CalibrationMatch {
  std::vector<int> m;
  Complex raw;
  Complex eigenvalue;
};

struct CalibrationReport {
  EnergyMap map;
  std::vector<CalibrationMatch> matches;
  int states_tried = 0;
  int runner_up_count = 0;
  bool steady_state_regular = false;  // some regular solution maps to E = 0
};

// Matches regular Bethe states of the sectors p = 1 and p = L/3 (r = 0)
// against ED spectra of (n_A, n_B) = (L - p, p).
CalibrationReport calibrate_energy_map(int length, const SolveOptions& opt = {});

struct CountingEntry {
  int index;
  int doubled;     // nearest doubled (half-)integer of L Y_L / 2pi, times 2
  Complex value;   // Y_L(Z_j)
  double residual; // |Y_L(Z_j) - pi * m_j / L|
};

Complex counting_function(const BetheRootSet& roots, Complex z);
std::vector<CountingEntry> counting_check(const BetheRootSet& roots);

// Max over k of the distance from conj(Z_k) to the nearest root.
double conjugation_defect(const BetheRootSet& roots);

BetheRootSet conjugate_state(const BetheRootSet& roots);

}  // namespace tasep
