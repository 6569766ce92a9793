#pragma once

#include <array>
#include <complex>
#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tasep/lattice.hpp"

namespace tasep {

using Matrix9 = Eigen::Matrix<Complex, 9, 9>;
using SparseC = Eigen::SparseMatrix<Complex>;

Complex weight_a(Complex theta);  // e^theta
Complex weight_c(Complex theta);  // 2 sinh theta

// R^{mk}_{il}: species indices A=0, B=1, vacancy=2.
struct RMatrix {
  Complex theta;
  std::array<Complex, 81> entries{};

  static RMatrix evaluate(Complex theta);
  Complex operator()(int m, int k, int i, int l) const { return entries[((m * 3 + k) * 3 + i) * 3 + l]; }
  Complex& operator()(int m, int k, int i, int l) { return entries[((m * 3 + k) * 3 + i) * 3 + l]; }
  // rows (m, k), columns (i, l)
  Matrix9 braid_operator() const;
};

using RFactory = std::function<RMatrix(Complex)>;

// Max-norm residual of R12(u) R23(u+v) R12(v) = R23(v) R12(u+v) R23(u),
// u = t1 - t2, v = t2 - t3.
double check_yang_baxter(Complex t1, Complex t2, Complex t3);
double check_yang_baxter(Complex t1, Complex t2, Complex t3, const RFactory& factory);

struct NestedWeights {
  Complex theta;
  Complex r11_11, r12_12, r21_12, r21_21, r22_22;

  static NestedWeights evaluate(Complex theta);
  Complex g() const;  // e^theta / (2 sinh theta)
  Complex h() const;  // 2 e^-theta sinh theta
};

class TransferMatrix {
 public:
  TransferMatrix(int length, Complex theta);

  int length() const { return length_; }
  Complex theta() const { return theta_; }
  // Monodromy entry T_ab as a 3^L x 3^L operator.
  const SparseC& monodromy(int a, int b) const { return t_[a * 3 + b]; }
  const SparseC& tau() const { return tau_; }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(tau_); }

 private:
  int length_;
  Complex theta_;
  std::array<SparseC, 9> t_;
  SparseC tau_;
};

TransferMatrix build_transfer_matrix(int length, Complex theta);

// 3x3 auxiliary-space block t_ab with [t_ab]_{ij} = R^{ib}_{aj}.
Eigen::Matrix3cd local_transfer_block(const RMatrix& r, int a, int b);

struct TransferHamiltonian {
  Eigen::MatrixXcd matrix;  // tau'(0) tau(0)^{-1}
  bool tau0_is_permutation = false;
  bool tau0_is_translation = false;
};

TransferHamiltonian hamiltonian_from_transfer(int length, double step = 1e-4, bool richardson = true);

enum class Orientation { Identity, Transpose, Reflection, ReflectionTranspose };
const char* to_string(Orientation o);

struct ConventionCalibration {
  Orientation orientation = Orientation::Identity;
  double scale = 0.0;
  double offset = 0.0;
  double discrepancy = 0.0;  // max |H_tau - scale * O(H) - offset|
};

// Site-reversal permutation on the 3^L space.
Eigen::MatrixXd reflection_operator(int length);

// Fits H_tau ~ scale * O(H) + offset over the four orientations O of the
// column-convention generator H of the full space.
ConventionCalibration calibrate_transfer_convention(const Eigen::MatrixXcd& h_tau, const SectorGenerator& full);

double commutator_norm(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y);

}  // namespace tasep
