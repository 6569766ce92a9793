#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace tasep {

using Complex = std::complex<double>;
using PackedIndex = std::uint64_t;

enum class Species : std::uint8_t { A = 0, B = 1, Vacancy = 2 };

char species_char(Species s);  // 'A', 'B', '0'
Species species_from_char(char c);

// Site 0 is the most significant base-3 digit, so ascending packed index is
// lexicographic order of the site string.
class RingConfiguration {
 public:
  explicit RingConfiguration(std::vector<Species> sites);
  static RingConfiguration from_packed(int length, PackedIndex index);
  static RingConfiguration parse(std::string_view text);

  int length() const { return static_cast<int>(sites_.size()); }
  Species operator[](int site) const;  // site taken modulo L
  const std::vector<Species>& sites() const { return sites_; }
  PackedIndex packed() const;
  int count(Species s) const;

  // Content moves `steps` sites to the right: result[i] = this[i - steps].
  RingConfiguration shifted(int steps) const;
  int period() const;
  std::string to_string() const;

  friend bool operator==(const RingConfiguration&, const RingConfiguration&) = default;

 private:
  std::vector<Species> sites_;
};

PackedIndex pow3(int n);

struct DiffusionRates {
  double gamma_right;
  double gamma_left;

  DiffusionRates(double right, double left);
  double asymmetry() const;  // q
  double diffusion() const;  // D
};

struct Sector {
  int length = 0;
  int n_a = 0;
  int n_b = 0;
  std::optional<int> momentum;

  int vacancies() const { return length - n_a - n_b; }
  void validate() const;
  std::uint64_t dimension() const;
};

std::vector<Sector> all_sectors(int length);

struct MatrixEntry {
  std::size_t row;
  std::size_t col;
  Complex value;
};

// Coordinate storage sorted by (row, col), no duplicates, no stored zeros.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t dimension, std::vector<MatrixEntry> triplets);

  std::size_t dimension() const { return dimension_; }
  const std::vector<MatrixEntry>& entries() const { return entries_; }
  bool is_real() const;
  Complex at(std::size_t row, std::size_t col) const;

  Eigen::MatrixXcd to_dense() const;
  Eigen::SparseMatrix<Complex> to_eigen() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::VectorXcd column_sums() const;

 private:
  std::size_t dimension_ = 0;
  std::vector<MatrixEntry> entries_;
};

// `basis` holds packed configurations; for momentum blocks it holds the
// orbit representatives (smallest packed index in the orbit).
struct SectorGenerator {
  int length = 0;
  std::optional<Sector> sector;  // empty for the full 3^L space
  std::vector<PackedIndex> basis;
  SparseMatrix matrix;
  // Left null vector (stationary measure direction). Empty if not known.
  Eigen::VectorXcd left_null;

  std::size_t dimension() const { return matrix.dimension(); }
};

std::vector<RingConfiguration> enumerate_sector(const Sector& sector);

SectorGenerator build_hamiltonian_general(const Sector& sector, const DiffusionRates& rates);
SectorGenerator build_hamiltonian_general(int length, const DiffusionRates& rates);
SectorGenerator build_hamiltonian_tasep(const Sector& sector);
SectorGenerator build_hamiltonian_tasep(int length);

// Local two-site operator of the partially asymmetric chain in its tensor-form
// orientation, index (x*3 + y) for the pair state |x y>.
Eigen::Matrix<double, 9, 9> local_bond_operator(const DiffusionRates& rates);

SectorGenerator project_momentum(const SectorGenerator& gen, int k);

// Strong connectivity of the transition graph.
bool is_ergodic(const SectorGenerator& gen);

void write_coordinate_text(std::ostream& out, const SparseMatrix& m);

}  // namespace tasep
