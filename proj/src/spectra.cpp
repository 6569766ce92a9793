#include "tasep/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "tasep/errors.hpp"

namespace tasep {

std::string to_string(SpectrumMethod m) { return m == SpectrumMethod::Dense ? "dense" : "krylov"; }

void sort_spectrum(std::vector<Complex>& values) {
  std::sort(values.begin(), values.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
}

std::optional<Complex> select_gap(const std::vector<Complex>& eigenvalues, double zero_tol) {
  std::optional<double> best;
  for (Complex v : eigenvalues)
    if (v.real() > zero_tol && (!best || v.real() < *best)) best = v.real();
  if (!best) return std::nullopt;
  const double tie = 1e-9 * std::max(1.0, *best);
  std::optional<Complex> pick;
  for (Complex v : eigenvalues) {
    if (std::abs(v.real() - *best) > tie || v.imag() < -tie) continue;
    if (!pick || v.imag() < pick->imag()) pick = v;
  }
  if (!pick) {
    for (Complex v : eigenvalues)
      if (v.real() == *best) pick = v;
  }
  return pick;
}

SpectrumResult dense_spectrum(const SectorGenerator& gen, const DenseOptions& opt) {
  const std::size_t n = gen.dimension();
  if (n > opt.dense_limit)
    throw DomainError("dimension " + std::to_string(n) + " exceeds the dense limit " +
                      std::to_string(opt.dense_limit) + "; use the Krylov path");
  SpectrumResult r;
  r.length = gen.length;
  r.sector = gen.sector;
  r.method = SpectrumMethod::Dense;
  if (gen.matrix.is_real()) {
    Eigen::MatrixXd m = gen.matrix.to_dense().real();
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r.eigenvalues.push_back(es.eigenvalues()(i));
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(gen.matrix.to_dense(), false);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r.eigenvalues.push_back(es.eigenvalues()(i));
  }
  sort_spectrum(r.eigenvalues);
  for (Complex v : r.eigenvalues)
    if (std::abs(v) <= opt.zero_tol) ++r.zero_count;
  r.gap = select_gap(r.eigenvalues, opt.zero_tol);
  return r;
}

namespace {

class Deflation {
 public:
  explicit Deflation(const Eigen::VectorXcd& w) : w_(w), norm2_(w.squaredNorm()) {}
  bool active() const { return w_.size() > 0; }
  // removes the component along conj(w) so that w^T x = 0
  void apply(Eigen::VectorXcd& x) const {
    if (!active()) return;
    Complex c = (w_.transpose() * x)(0) / norm2_;
    x -= c * w_.conjugate();
  }

 private:
  Eigen::VectorXcd w_;
  double norm2_;
};

}  // namespace

SpectrumResult krylov_gap(const SectorGenerator& gen, std::uint64_t seed, const KrylovOptions& opt) {
  const Eigen::Index n = static_cast<Eigen::Index>(gen.dimension());
  if (n == 0) throw DomainError("empty generator");
  if (!(opt.shift < 0.0)) throw DomainError("Krylov shift must be negative real");

  // deflate the steady state only where it is unique
  const bool deflate = gen.left_null.size() == n && is_ergodic(gen);
  Deflation defl(deflate ? gen.left_null : Eigen::VectorXcd());
  const Eigen::Index usable = deflate ? n - 1 : n;

  SpectrumResult r;
  r.length = gen.length;
  r.sector = gen.sector;
  r.method = SpectrumMethod::Krylov;
  r.steady_state_deflated = deflate;
  if (usable == 0) return r;

  Eigen::SparseMatrix<Complex> A = gen.matrix.to_eigen();
  Eigen::SparseMatrix<Complex> shifted = A;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= opt.shift;
  shifted.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) throw NumericalError("sparse LU of the shifted generator failed");

  const Eigen::Index m_max = std::min<Eigen::Index>(opt.max_basis, usable);
  const Eigen::Index wanted = std::min<Eigen::Index>(opt.wanted, usable);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd V(n, m_max + 1);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m_max + 1, m_max);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(normal(rng), normal(rng));
  defl.apply(v);
  V.col(0) = v / v.norm();

  double worst = 0.0;
  for (Eigen::Index j = 0; j < m_max; ++j) {
    Eigen::VectorXcd w = lu.solve(V.col(j));
    defl.apply(w);
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXcd c = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * c;
      H.col(j).head(j + 1) += c;
    }
    const double beta = w.norm();
    H(j + 1, j) = beta;
    const bool breakdown = beta <= 1e-13 * H.col(j).head(j + 1).norm();
    if (!breakdown) V.col(j + 1) = w / beta;

    const Eigen::Index m = j + 1;
    const bool check = breakdown || m == m_max || (m >= wanted && (m - wanted) % 5 == 0);
    if (!check) continue;

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H.topLeftCorner(m, m), true);
    std::vector<Eigen::Index> order(m);
    for (Eigen::Index i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b)); });
    const Eigen::Index take = std::min(wanted, m);
    std::vector<Complex> values;
    worst = 0.0;
    for (Eigen::Index t = 0; t < take; ++t) {
      Eigen::Index i = order[t];
      Complex mu = es.eigenvalues()(i);
      Complex lambda = opt.shift + 1.0 / mu;
      Eigen::VectorXcd x = V.leftCols(m) * es.eigenvectors().col(i);
      x /= x.norm();
      double res = (A * x - lambda * x).norm();
      worst = std::max(worst, res);
      values.push_back(lambda);
    }
    if (worst <= opt.residual_tol || (breakdown && worst <= 10 * opt.residual_tol)) {
      sort_spectrum(values);
      r.eigenvalues = values;
      r.max_residual = worst;
      r.krylov_dimension = static_cast<int>(m);
      for (Complex val : values)
        if (std::abs(val) <= opt.zero_tol) ++r.zero_count;
      r.gap = select_gap(values, opt.zero_tol);
      return r;
    }
    if (breakdown) break;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "Krylov iteration did not converge: worst residual %.3e > %.1e with basis %lld",
                worst, opt.residual_tol, static_cast<long long>(m_max));
  throw NumericalError(buf);
}

void write_spectrum_text(std::ostream& out, const std::vector<Complex>& values) {
  char buf[96];
  for (Complex v : values) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.real(), v.imag());
    out << buf;
  }
}

}  // namespace tasep
