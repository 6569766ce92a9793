#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tasep/lattice.hpp"

namespace tasep {

enum class SpectrumMethod { Dense, Krylov };
std::string to_string(SpectrumMethod m);

struct SpectrumResult {
  int length = 0;
  std::optional<Sector> sector;
  std::vector<Complex> eigenvalues;  // sorted by (Re, Im)
  std::optional<Complex> gap;        // empty when no eigenvalue has Re > zero_tol
  SpectrumMethod method = SpectrumMethod::Dense;
  int zero_count = 0;                // eigenvalues with |value| <= zero_tol
  bool steady_state_deflated = false;
  double max_residual = 0.0;         // Krylov only
  int krylov_dimension = 0;          // Krylov only
};

struct DenseOptions {
  double zero_tol = 1e-10;
  std::size_t dense_limit = 4000;
};

struct KrylovOptions {
  double zero_tol = 1e-10;
  double residual_tol = 1e-10;
  double shift = -1.0;  // real, negative: targets small real parts
  int wanted = 12;
  int max_basis = 300;
};

SpectrumResult dense_spectrum(const SectorGenerator& gen, const DenseOptions& opt = {});
SpectrumResult krylov_gap(const SectorGenerator& gen, std::uint64_t seed, const KrylovOptions& opt = {});

// Smallest Re > zero_tol; among a conjugate pair, the member with Im >= 0.
std::optional<Complex> select_gap(const std::vector<Complex>& eigenvalues, double zero_tol = 1e-10);

void sort_spectrum(std::vector<Complex>& values);
void write_spectrum_text(std::ostream& out, const std::vector<Complex>& values);

}  // namespace tasep
