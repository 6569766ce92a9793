#include "tasep/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "tasep/errors.hpp"

namespace tasep {

char species_char(Species s) {
  switch (s) {
    case Species::A:
      return 'A';
    case Species::B:
      return 'B';
    case Species::Vacancy:
      return '0';
  }
  return '?';
}

Species species_from_char(char c) {
  switch (c) {
    case 'A':
    case 'a':
      return Species::A;
    case 'B':
    case 'b':
      return Species::B;
    case '0':
    case '.':
      return Species::Vacancy;
    default:
      throw DomainError(std::string("unknown species symbol '") + c + "'");
  }
}

PackedIndex pow3(int n) {
  PackedIndex r = 1;
  for (int i = 0; i < n; ++i) r *= 3;
  return r;
}

RingConfiguration::RingConfiguration(std::vector<Species> sites) : sites_(std::move(sites)) {
  if (sites_.empty() || sites_.size() > 40) throw DomainError("ring length must be in [1, 40]");
}

RingConfiguration RingConfiguration::from_packed(int length, PackedIndex index) {
  if (length < 1 || length > 40) throw DomainError("ring length must be in [1, 40]");
  if (index >= pow3(length)) throw DomainError("packed index out of range");
  std::vector<Species> s(length);
  for (int i = length - 1; i >= 0; --i) {
    s[i] = static_cast<Species>(index % 3);
    index /= 3;
  }
  return RingConfiguration(std::move(s));
}

RingConfiguration RingConfiguration::parse(std::string_view text) {
  std::vector<Species> s;
  for (char c : text) {
    if (c == ' ') continue;
    s.push_back(species_from_char(c));
  }
  return RingConfiguration(std::move(s));
}

Species RingConfiguration::operator[](int site) const {
  int n = length();
  return sites_[((site % n) + n) % n];
}

PackedIndex RingConfiguration::packed() const {
  PackedIndex r = 0;
  for (Species s : sites_) r = 3 * r + static_cast<PackedIndex>(s);
  return r;
}

int RingConfiguration::count(Species s) const {
  return static_cast<int>(std::count(sites_.begin(), sites_.end(), s));
}

RingConfiguration RingConfiguration::shifted(int steps) const {
  int n = length();
  std::vector<Species> out(n);
  for (int i = 0; i < n; ++i) out[i] = (*this)[i - steps];
  return RingConfiguration(std::move(out));
}

int RingConfiguration::period() const {
  int n = length();
  for (int p = 1; p < n; ++p) {
    if (n % p == 0 && shifted(p) == *this) return p;
  }
  return n;
}

std::string RingConfiguration::to_string() const {
  std::string s;
  for (Species x : sites_) s.push_back(species_char(x));
  return s;
}

DiffusionRates::DiffusionRates(double right, double left) : gamma_right(right), gamma_left(left) {
  if (!(right >= 0.0) || !(left >= 0.0)) throw DomainError("hop rates must be nonnegative");
  if (right == 0.0 && left == 0.0) throw DomainError("hop rates must not both vanish");
}

double DiffusionRates::asymmetry() const {
  if (gamma_left <= 0.0) throw DomainError("q is undefined for gamma_L = 0; use the totally asymmetric builder");
  return std::sqrt(gamma_right / gamma_left);
}

double DiffusionRates::diffusion() const {
  if (gamma_left <= 0.0) throw DomainError("D is undefined for gamma_L = 0; use the totally asymmetric builder");
  return std::sqrt(gamma_right * gamma_left);
}

void Sector::validate() const {
  if (length < 1 || length > 40) throw DomainError("sector length must be in [1, 40]");
  if (n_a < 0 || n_b < 0 || n_a + n_b > length)
    throw DomainError("invalid sector counts n_A=" + std::to_string(n_a) + " n_B=" + std::to_string(n_b) +
                      " for L=" + std::to_string(length));
  if (momentum && (*momentum < 0 || *momentum >= length))
    throw DomainError("momentum must lie in [0, L)");
}

std::uint64_t Sector::dimension() const {
  validate();
  // multinomial L! / (nA! nB! n0!) as a product of binomials
  auto binom = [](std::uint64_t n, std::uint64_t k) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  return binom(length, n_a) * binom(length - n_a, n_b);
}

std::vector<Sector> all_sectors(int length) {
  std::vector<Sector> out;
  for (int a = 0; a <= length; ++a)
    for (int b = 0; a + b <= length; ++b) out.push_back(Sector{length, a, b, std::nullopt});
  return out;
}

SparseMatrix::SparseMatrix(std::size_t dimension, std::vector<MatrixEntry> triplets) : dimension_(dimension) {
  for (const auto& e : triplets) {
    if (e.row >= dimension || e.col >= dimension) throw DomainError("matrix entry out of range");
  }
  std::sort(triplets.begin(), triplets.end(), [](const MatrixEntry& x, const MatrixEntry& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  for (const auto& e : triplets) {
    if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col)
      entries_.back().value += e.value;
    else
      entries_.push_back(e);
  }
  std::erase_if(entries_, [](const MatrixEntry& e) { return e.value == Complex(0.0, 0.0); });
}

bool SparseMatrix::is_real() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const MatrixEntry& e) { return e.value.imag() == 0.0; });
}

Complex SparseMatrix::at(std::size_t row, std::size_t col) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair(row, col),
                             [](const MatrixEntry& e, const std::pair<std::size_t, std::size_t>& key) {
                               return e.row != key.first ? e.row < key.first : e.col < key.second;
                             });
  if (it != entries_.end() && it->row == row && it->col == col) return it->value;
  return {0.0, 0.0};
}

Eigen::MatrixXcd SparseMatrix::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dimension_, dimension_);
  for (const auto& e : entries_) m(e.row, e.col) = e.value;
  return m;
}

Eigen::SparseMatrix<Complex> SparseMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(entries_.size());
  for (const auto& e : entries_) t.emplace_back(e.row, e.col, e.value);
  Eigen::SparseMatrix<Complex> m(dimension_, dimension_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::VectorXcd SparseMatrix::apply(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dimension_);
  for (const auto& e : entries_) y(e.row) += e.value * x(e.col);
  return y;
}

Eigen::VectorXcd SparseMatrix::column_sums() const {
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(dimension_);
  for (const auto& e : entries_) s(e.col) += e.value;
  return s;
}

namespace {

void fill_sector(int length, int pos, int na, int nb, int n0, PackedIndex prefix, std::vector<PackedIndex>& out) {
  if (pos == length) {
    out.push_back(prefix);
    return;
  }
  if (na > 0) fill_sector(length, pos + 1, na - 1, nb, n0, 3 * prefix + 0, out);
  if (nb > 0) fill_sector(length, pos + 1, na, nb - 1, n0, 3 * prefix + 1, out);
  if (n0 > 0) fill_sector(length, pos + 1, na, nb, n0 - 1, 3 * prefix + 2, out);
}

std::vector<PackedIndex> sector_basis(const Sector& s) {
  std::vector<PackedIndex> out;
  out.reserve(s.dimension());
  fill_sector(s.length, 0, s.n_a, s.n_b, s.vacancies(), 0, out);
  return out;
}

std::vector<PackedIndex> full_basis(int length) {
  std::vector<PackedIndex> out(pow3(length));
  for (PackedIndex i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

std::size_t index_of(const std::vector<PackedIndex>& basis, PackedIndex c) {
  auto it = std::lower_bound(basis.begin(), basis.end(), c);
  if (it == basis.end() || *it != c) throw DomainError("configuration outside the basis");
  return static_cast<std::size_t>(it - basis.begin());
}

// Bond-local rewrite of a packed configuration: digits of sites i and j.
struct Digits {
  int length;
  std::vector<PackedIndex> place;  // 3^(L-1-i)
  explicit Digits(int L) : length(L), place(L) {
    for (int i = 0; i < L; ++i) place[i] = pow3(L - 1 - i);
  }
  int get(PackedIndex c, int i) const { return static_cast<int>((c / place[i]) % 3); }
  PackedIndex set_pair(PackedIndex c, int i, int j, int xi, int xj) const {
    c -= get(c, i) * place[i];
    c -= get(c, j) * place[j];
    return c + xi * place[i] + xj * place[j];
  }
};

// Column convention: entry (c', c) is minus the rate c -> c'.
template <class LocalColumn>
SectorGenerator assemble(int length, std::optional<Sector> sector, std::vector<PackedIndex> basis,
                         LocalColumn&& local) {
  Digits d(length);
  std::vector<MatrixEntry> t;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    PackedIndex c = basis[col];
    for (int i = 0; i < length; ++i) {
      int j = (i + 1) % length;
      int x = d.get(c, i), y = d.get(c, j);
      for (int xp = 0; xp < 3; ++xp)
        for (int yp = 0; yp < 3; ++yp) {
          double v = local(x, y, xp, yp);
          if (v == 0.0) continue;
          PackedIndex target = d.set_pair(c, i, j, xp, yp);
          t.push_back({index_of(basis, target), col, Complex(v, 0.0)});
        }
    }
  }
  SectorGenerator g;
  g.length = length;
  g.sector = sector;
  std::size_t n = basis.size();
  g.basis = std::move(basis);
  g.matrix = SparseMatrix(n, std::move(t));
  g.left_null = Eigen::VectorXcd::Ones(n);
  return g;
}

double tasep_local(int x, int y, int xp, int yp) {
  if (x >= y) return 0.0;
  if (xp == x && yp == y) return 1.0;
  if (xp == y && yp == x) return -1.0;
  return 0.0;
}

void require_length(int length) {
  if (length < 2) throw DomainError("the ring needs L >= 2");
  if (length > 20) throw DomainError("L > 20 is too large for explicit assembly");
}

}  // namespace

std::vector<RingConfiguration> enumerate_sector(const Sector& sector) {
  sector.validate();
  std::vector<RingConfiguration> out;
  for (PackedIndex c : sector_basis(sector)) out.push_back(RingConfiguration::from_packed(sector.length, c));
  return out;
}

Eigen::Matrix<double, 9, 9> local_bond_operator(const DiffusionRates& rates) {
  const double q = rates.asymmetry(), D = rates.diffusion();
  const double sym = 0.5 * (q + 1.0 / q), anti = 0.5 * (q - 1.0 / q);
  Eigen::Matrix<double, 9, 9> h = Eigen::Matrix<double, 9, 9>::Identity() * sym;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a < b) h(a * 3 + b, b * 3 + a) -= q;
      if (a > b) h(a * 3 + b, b * 3 + a) -= 1.0 / q;
      if (a == b) h(a * 3 + a, a * 3 + a) -= sym;
      if (a != b) h(a * 3 + b, a * 3 + b) -= anti * (a > b ? 1.0 : -1.0);
    }
  return D * h;
}

SectorGenerator build_hamiltonian_general(const Sector& sector, const DiffusionRates& rates) {
  require_length(sector.length);
  sector.validate();
  if (sector.momentum) throw DomainError("build the sector first, then project momentum");
  auto h = local_bond_operator(rates);
  // transpose of the tensor-form (row) orientation gives zero column sums
  return assemble(sector.length, sector, sector_basis(sector),
                  [&](int x, int y, int xp, int yp) { return h(x * 3 + y, xp * 3 + yp); });
}

SectorGenerator build_hamiltonian_general(int length, const DiffusionRates& rates) {
  require_length(length);
  auto h = local_bond_operator(rates);
  return assemble(length, std::nullopt, full_basis(length),
                  [&](int x, int y, int xp, int yp) { return h(x * 3 + y, xp * 3 + yp); });
}

SectorGenerator build_hamiltonian_tasep(const Sector& sector) {
  require_length(sector.length);
  sector.validate();
  if (sector.momentum) throw DomainError("build the sector first, then project momentum");
  return assemble(sector.length, sector, sector_basis(sector), tasep_local);
}

SectorGenerator build_hamiltonian_tasep(int length) {
  require_length(length);
  return assemble(length, std::nullopt, full_basis(length), tasep_local);
}

SectorGenerator project_momentum(const SectorGenerator& gen, int k) {
  const int L = gen.length;
  if (k < 0 || k >= L) throw DomainError("momentum must lie in [0, L)");
  if (gen.sector && gen.sector->momentum) throw DomainError("generator is already a momentum block");
  const PackedIndex top = pow3(L - 1);
  auto rotate = [&](PackedIndex c) { return (c % 3) * top + c / 3; };  // content one site right

  struct Orbit {
    PackedIndex rep;
    int shift;  // c = T^shift rep
    int period;
  };
  auto orbit = [&](PackedIndex c) {
    Orbit o{c, 0, L};
    PackedIndex x = c;
    for (int s = 1; s <= L; ++s) {
      x = rotate(x);
      if (x == c) {
        o.period = s;
        break;
      }
      if (x < o.rep) {
        o.rep = x;
        o.shift = L - s;
      }
    }
    return o;
  };

  std::vector<std::vector<std::pair<std::size_t, Complex>>> columns(gen.dimension());
  for (const auto& e : gen.matrix.entries()) columns[e.col].push_back({e.row, e.value});

  std::vector<PackedIndex> reps;
  std::vector<std::size_t> rep_cols;
  for (std::size_t i = 0; i < gen.basis.size(); ++i) {
    Orbit o = orbit(gen.basis[i]);
    if (o.rep != gen.basis[i]) continue;
    if ((k * o.period) % L != 0) continue;
    reps.push_back(o.rep);
    rep_cols.push_back(i);
  }

  const double kappa = 2.0 * std::numbers::pi * k / L;
  std::vector<MatrixEntry> t;
  for (std::size_t j = 0; j < reps.size(); ++j) {
    for (const auto& [row, value] : columns[rep_cols[j]]) {
      Orbit o = orbit(gen.basis[row]);
      auto it = std::lower_bound(reps.begin(), reps.end(), o.rep);
      if (it == reps.end() || *it != o.rep) {
        if (std::binary_search(gen.basis.begin(), gen.basis.end(), o.rep)) continue;  // vanishes at this k
        throw DomainError("generator is not translation invariant on its basis");
      }
      std::size_t i = static_cast<std::size_t>(it - reps.begin());
      t.push_back({i, j, value * std::polar(1.0, kappa * o.shift)});
    }
  }

  SectorGenerator out;
  out.length = L;
  out.sector = gen.sector;
  if (out.sector) out.sector->momentum = k;
  out.matrix = SparseMatrix(reps.size(), std::move(t));
  out.basis = std::move(reps);
  if (k == 0) out.left_null = Eigen::VectorXcd::Ones(out.basis.size());
  return out;
}

bool is_ergodic(const SectorGenerator& gen) {
  const std::size_t n = gen.dimension();
  if (n <= 1) return true;
  std::vector<std::vector<std::size_t>> fwd(n), bwd(n);
  for (const auto& e : gen.matrix.entries()) {
    if (e.row == e.col) continue;
    fwd[e.col].push_back(e.row);
    bwd[e.row].push_back(e.col);
  }
  auto reaches_all = [n](const std::vector<std::vector<std::size_t>>& g) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : g[v])
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
    }
    return count == n;
  };
  return reaches_all(fwd) && reaches_all(bwd);
}

void write_coordinate_text(std::ostream& out, const SparseMatrix& m) {
  char buf[128];
  for (const auto& e : m.entries()) {
    std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g\n", e.row, e.col, e.value.real(), e.value.imag());
    out << buf;
  }
}

}  // namespace tasep
