#include "tasep/yangbaxter.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <unsupported/Eigen/KroneckerProduct>

#include "tasep/errors.hpp"

namespace tasep {

Complex weight_a(Complex theta) { return std::exp(theta); }
Complex weight_c(Complex theta) { return 2.0 * std::sinh(theta); }

RMatrix RMatrix::evaluate(Complex theta) {
  RMatrix r;
  r.theta = theta;
  for (int a = 0; a < 3; ++a) {
    r(a, a, a, a) = weight_a(theta);
    for (int b = 0; b < 3; ++b) {
      if (a < b) {
        r(a, b, b, a) = weight_c(theta);
        r(a, b, a, b) = std::exp(theta);
      } else if (a > b) {
        r(a, b, a, b) = std::exp(-theta);
      }
    }
  }
  return r;
}

Matrix9 RMatrix::braid_operator() const {
  Matrix9 m;
  for (int mk = 0; mk < 9; ++mk)
    for (int il = 0; il < 9; ++il) m(mk, il) = entries[mk * 9 + il];
  return m;
}

double check_yang_baxter(Complex t1, Complex t2, Complex t3) {
  return check_yang_baxter(t1, t2, t3, RMatrix::evaluate);
}

double check_yang_baxter(Complex t1, Complex t2, Complex t3, const RFactory& factory) {
  const Complex u = t1 - t2, v = t2 - t3;
  const Eigen::Matrix3cd id = Eigen::Matrix3cd::Identity();
  auto op12 = [&](Complex x) -> Eigen::MatrixXcd {
    return Eigen::kroneckerProduct(factory(x).braid_operator(), id).eval();
  };
  auto op23 = [&](Complex x) -> Eigen::MatrixXcd {
    return Eigen::kroneckerProduct(id, factory(x).braid_operator()).eval();
  };
  Eigen::MatrixXcd lhs = op12(u) * op23(u + v) * op12(v);
  Eigen::MatrixXcd rhs = op23(v) * op12(u + v) * op23(u);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

NestedWeights NestedWeights::evaluate(Complex theta) {
  NestedWeights w;
  w.theta = theta;
  w.r11_11 = 1.0;
  w.r12_12 = 1.0;
  w.r21_12 = 2.0 * std::sinh(theta) * std::exp(-theta);
  w.r21_21 = std::exp(-2.0 * theta);
  w.r22_22 = 1.0;
  return w;
}

Complex NestedWeights::g() const { return std::exp(theta) / (2.0 * std::sinh(theta)); }
Complex NestedWeights::h() const { return 2.0 * std::exp(-theta) * std::sinh(theta); }

Eigen::Matrix3cd local_transfer_block(const RMatrix& r, int a, int b) {
  Eigen::Matrix3cd t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = r(i, b, a, j);
  return t;
}

TransferMatrix::TransferMatrix(int length, Complex theta) : length_(length), theta_(theta) {
  if (length < 1) throw DomainError("transfer matrix needs L >= 1");
  if (length > 8) throw DomainError("transfer matrix limited to L <= 8 (3^L operators)");
  RMatrix r = RMatrix::evaluate(theta);
  std::array<SparseC, 9> local;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      local[a * 3 + b] = local_transfer_block(r, a, b).sparseView();
      t_[a * 3 + b] = local[a * 3 + b];
    }
  for (int n = 1; n < length; ++n) {
    std::array<SparseC, 9> next;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        SparseC acc(t_[0].rows() * 3, t_[0].cols() * 3);
        for (int c = 0; c < 3; ++c) {
          SparseC term = Eigen::kroneckerProduct(t_[a * 3 + c], local[c * 3 + b]);
          acc += term;
        }
        acc.prune(Complex(0.0, 0.0));
        next[a * 3 + b] = acc;
      }
    t_ = std::move(next);
  }
  tau_ = t_[0] + t_[4] + t_[8];
}

TransferMatrix build_transfer_matrix(int length, Complex theta) { return TransferMatrix(length, theta); }

namespace {

bool is_permutation(const Eigen::MatrixXcd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    int ones = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      Complex v = m(i, j);
      if (v == Complex(1.0, 0.0))
        ++ones;
      else if (v != Complex(0.0, 0.0))
        return false;
    }
    if (ones != 1) return false;
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    int ones = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) ones += m(i, j) == Complex(1.0, 0.0);
    if (ones != 1) return false;
  }
  return true;
}

Eigen::MatrixXd translation_operator(int length) {
  const PackedIndex n = pow3(length);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (PackedIndex c = 0; c < n; ++c) {
    PackedIndex image = RingConfiguration::from_packed(length, c).shifted(1).packed();
    t(image, c) = 1.0;
  }
  return t;
}

}  // namespace

TransferHamiltonian hamiltonian_from_transfer(int length, double step, bool richardson) {
  if (length > 6) throw DomainError("transfer-matrix Hamiltonian limited to L <= 6");
  auto tau = [&](double x) { return build_transfer_matrix(length, Complex(x, 0.0)).dense(); };
  auto central = [&](double h) -> Eigen::MatrixXcd { return (tau(h) - tau(-h)) / (2.0 * h); };
  Eigen::MatrixXcd deriv = central(step);
  if (richardson) deriv = (4.0 * central(step / 2.0) - deriv) / 3.0;

  TransferHamiltonian out;
  Eigen::MatrixXcd t0 = tau(0.0);
  if (is_permutation(t0)) {
    out.tau0_is_permutation = true;
    Eigen::MatrixXd tr = translation_operator(length);
    out.tau0_is_translation = t0.real() == tr || t0.real() == tr.transpose();
    out.matrix = deriv * t0.transpose();
    return out;
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(t0);
  if (!lu.isInvertible())
    throw DomainError("tau(0) is singular (rank " + std::to_string(lu.rank()) + " of " +
                      std::to_string(t0.rows()) + "); logarithmic derivative undefined");
  out.matrix = deriv * lu.inverse();
  return out;
}

const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::Identity:
      return "identity";
    case Orientation::Transpose:
      return "transpose";
    case Orientation::Reflection:
      return "reflection";
    case Orientation::ReflectionTranspose:
      return "reflection-transpose";
  }
  return "?";
}

Eigen::MatrixXd reflection_operator(int length) {
  const PackedIndex n = pow3(length);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (PackedIndex c = 0; c < n; ++c) {
    auto s = RingConfiguration::from_packed(length, c).sites();
    std::reverse(s.begin(), s.end());
    p(RingConfiguration(s).packed(), c) = 1.0;
  }
  return p;
}

ConventionCalibration calibrate_transfer_convention(const Eigen::MatrixXcd& h_tau, const SectorGenerator& full) {
  const Eigen::Index n = h_tau.rows();
  if (full.sector || static_cast<Eigen::Index>(full.dimension()) != n)
    throw DomainError("calibration needs the full-space generator of matching size");
  Eigen::MatrixXcd h = full.matrix.to_dense();
  Eigen::MatrixXcd p = reflection_operator(full.length).cast<Complex>();
  const std::array<std::pair<Orientation, Eigen::MatrixXcd>, 4> candidates = {{
      {Orientation::Identity, h},
      {Orientation::Transpose, h.transpose()},
      {Orientation::Reflection, p * h * p},
      {Orientation::ReflectionTranspose, p * h.transpose() * p},
  }};
  ConventionCalibration best;
  best.discrepancy = std::numeric_limits<double>::infinity();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  for (const auto& [orientation, c] : candidates) {
    // least squares for vec(h_tau) = s vec(c) + o vec(I)
    Eigen::MatrixXcd design(n * n, 2);
    design.col(0) = c.reshaped();
    design.col(1) = id.reshaped();
    Eigen::VectorXcd target = h_tau.reshaped();
    Eigen::Vector2cd coef = design.colPivHouseholderQr().solve(target);
    double disc = (h_tau - coef(0) * c - coef(1) * id).cwiseAbs().maxCoeff();
    if (disc < best.discrepancy) {
      best = {orientation, coef(0).real(), coef(1).real(), disc};
      // imaginary parts of the fit are part of the discrepancy
      best.discrepancy = std::max(disc, std::max(std::abs(coef(0).imag()), std::abs(coef(1).imag())));
    }
  }
  return best;
}

double commutator_norm(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
  return (x * y - y * x).cwiseAbs().maxCoeff();
}

}  // namespace tasep
