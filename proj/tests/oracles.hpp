#pragma once
// Reference builders used only by the tests. None of these share code with
// the library: configurations are plain strings over {'0','1','2'}
// (A, B, vacancy), and the Kronecker builder follows the operator form of
// the master equation term by term.
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace oracle {

inline std::vector<std::string> sector_strings(int L, int na, int nb) {
  std::string s = std::string(na, '0') + std::string(nb, '1') + std::string(L - na - nb, '2');
  std::vector<std::string> out;
  do out.push_back(s);
  while (std::next_permutation(s.begin(), s.end()));
  return out;
}

inline std::string decode(int L, unsigned long long packed) {
  std::string s(L, '0');
  for (int i = L - 1; i >= 0; --i) {
    s[i] = static_cast<char>('0' + packed % 3);
    packed /= 3;
  }
  return s;
}

// Outgoing moves of a configuration: the left member of a bond moves right
// when it has the higher priority (A over B over vacancy).
inline std::vector<std::string> moves(const std::string& s) {
  std::vector<std::string> out;
  const int L = static_cast<int>(s.size());
  for (int i = 0; i < L; ++i) {
    int j = (i + 1) % L;
    if (s[i] < s[j]) {
      std::string t = s;
      std::swap(t[i], t[j]);
      out.push_back(t);
    }
  }
  return out;
}

// Column convention: G[target][source] = -rate, G[source][source] = escape rate.
inline Eigen::MatrixXd brute_generator(const std::vector<std::string>& basis) {
  std::map<std::string, int> pos;
  for (std::size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = static_cast<int>(i);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c)
    for (auto& t : moves(basis[c])) {
      g(pos.at(t), c) -= 1.0;
      g(c, c) += 1.0;
    }
  return g;
}

inline Eigen::Matrix3d unit(int a, int b) {
  Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
  e(a, b) = 1.0;
  return e;
}

inline Eigen::MatrixXd place(int L, const std::map<int, Eigen::Matrix3d>& ops) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
  for (int s = 0; s < L; ++s) {
    Eigen::Matrix3d m = ops.count(s) ? ops.at(s) : Eigen::Matrix3d::Identity();
    Eigen::MatrixXd next = Eigen::kroneckerProduct(out, m).eval();
    out = next;
  }
  return out;
}

// The chain operator in tensor form, written with D q = gamma_R and
// D / q = gamma_L so that gamma_L = 0 is allowed. Row convention.
inline Eigen::MatrixXd kronecker_chain(int L, double gamma_r, double gamma_l) {
  const double sym = 0.5 * (gamma_r + gamma_l), anti = 0.5 * (gamma_r - gamma_l);
  const int n = static_cast<int>(std::pow(3, L));
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < L; ++j) {
    int k = (j + 1) % L;
    h += sym * Eigen::MatrixXd::Identity(n, n);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        if (a == b) {
          h -= sym * place(L, {{j, unit(a, a)}, {k, unit(a, a)}});
          continue;
        }
        h -= (a < b ? gamma_r : gamma_l) * place(L, {{j, unit(a, b)}, {k, unit(b, a)}});
        double sign = a > b ? 1.0 : -1.0;
        h -= anti * sign * place(L, {{j, unit(a, a)}, {k, unit(b, b)}});
      }
  }
  return h;
}

// L = 2 full space written out by hand. Each mixed pair xy, yx flips with
// rate one through one of the two bonds.
inline Eigen::MatrixXd two_site_by_hand() {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(9, 9);
  const int pairs[3][2] = {{1, 3}, {2, 6}, {5, 7}};  // AB/BA, A0/0A, B0/0B
  for (auto& p : pairs) {
    g(p[0], p[0]) = 1;
    g(p[1], p[1]) = 1;
    g(p[0], p[1]) = -1;
    g(p[1], p[0]) = -1;
  }
  return g;
}

}  // namespace oracle
