#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tasep/bethe.hpp"

namespace tasep {

enum class SeriesSource { Bethe, Ed, Mixed };
std::string to_string(SeriesSource s);

struct GapSeries {
  std::vector<int> lengths;
  std::vector<double> gaps;  // Re of the gap eigenvalue
  SeriesSource source = SeriesSource::Bethe;

  // L strictly increasing and divisible by 3, gaps positive and decreasing.
  void validate() const;
};

struct Extrapolant {
  int length;
  double value;
};

// Log(E(L)/E(L+step)) / Log(L/(L+step)) for each adjacent pair.
std::vector<Extrapolant> local_exponent(const GapSeries& series, int step = 3);

struct BstTableau {
  double omega = 1.0;
  std::vector<std::vector<double>> table;  // table[k][m]; column 0 is the input
  double limit = 0.0;
  double error_estimate = 0.0;
  bool truncated = false;
};

BstTableau bst_extrapolate(const std::vector<double>& lengths, const std::vector<double>& values, double omega);

// Runs every omega and keeps the tableau with the smallest error estimate.
BstTableau bst_scan(const std::vector<double>& lengths, const std::vector<double>& values,
                    const std::vector<double>& omegas = {0.5, 1.0, 1.5, 2.0});

struct ScalingStudy {
  GapSeries series;
  std::vector<Extrapolant> extrapolants;
  BstTableau tableau;
  double z_estimate = 0.0;
  double error = 0.0;
  std::vector<BetheRootSet> roots;
};

// Extrapolants are produced for L_min..L_max, so gaps run up to L_max + step.
// `on_gap` sees every gap as soon as it is available.
ScalingStudy run_scaling_study(int l_min, int l_max, int step = 3,
                               const std::vector<double>& omegas = {0.5, 1.0, 1.5, 2.0},
                               const ContinuationOptions& opt = {},
                               const std::function<void(const BetheRootSet&, double)>& on_gap = {});

}  // namespace tasep
