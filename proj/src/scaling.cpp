#include "tasep/scaling.hpp"

#include <cmath>
#include <limits>

#include "tasep/errors.hpp"

namespace tasep {

std::string to_string(SeriesSource s) {
  switch (s) {
    case SeriesSource::Bethe:
      return "bethe";
    case SeriesSource::Ed:
      return "ed";
    case SeriesSource::Mixed:
      return "mixed";
  }
  return "?";
}

void GapSeries::validate() const {
  if (lengths.size() != gaps.size()) throw DomainError("gap series: length and gap lists differ in size");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] % 3 != 0) throw DomainError("gap series: L must be a multiple of 3");
    if (!(gaps[i] > 0.0)) throw DomainError("gap series: gaps must be positive");
    if (i > 0 && lengths[i] <= lengths[i - 1]) throw DomainError("gap series: L must increase");
    if (i > 0 && gaps[i] >= gaps[i - 1]) throw DomainError("gap series: gaps must decrease with L");
  }
}

std::vector<Extrapolant> local_exponent(const GapSeries& series, int step) {
  if (series.lengths.size() != series.gaps.size()) throw DomainError("gap series: size mismatch");
  std::vector<Extrapolant> out;
  for (std::size_t i = 0; i + 1 < series.lengths.size(); ++i) {
    const int a = series.lengths[i], b = series.lengths[i + 1];
    if (b - a != step) throw DomainError("local exponent needs consecutive sizes L, L+" + std::to_string(step));
    if (!(series.gaps[i] > 0.0) || !(series.gaps[i + 1] > 0.0)) throw DomainError("gaps must be positive");
    out.push_back({a, std::log(series.gaps[i] / series.gaps[i + 1]) / std::log(static_cast<double>(a) / b)});
  }
  return out;
}

namespace {

BstTableau bst_core(const std::vector<double>& lengths, const std::vector<double>& values, double omega,
                    std::size_t min_entries) {
  const std::size_t n = values.size();
  if (n < min_entries) throw DomainError("BST needs at least " + std::to_string(min_entries) + " entries");
  if (lengths.size() != n) throw DomainError("BST: lengths and values differ in size");
  if (!(omega > 0.0)) throw DomainError("BST: omega must be positive");
  constexpr double eps = std::numeric_limits<double>::epsilon();

  BstTableau t;
  t.omega = omega;
  t.table.push_back(values);
  std::vector<double> before(n + 1, 0.0);  // column k-2, starts as T_{m,-1} = 0
  for (std::size_t k = 1; k < n && !t.truncated; ++k) {
    const std::vector<double>& prev = t.table.back();
    std::vector<double> col;
    for (std::size_t m = 0; m + k < n; ++m) {
      const double d = prev[m + 1] - prev[m];
      const double scale = std::max(1.0, std::abs(prev[m + 1]));
      if (std::abs(d) <= 8 * eps * scale) {
        col.push_back(prev[m + 1]);
        continue;
      }
      const double inner = prev[m + 1] - before[m + 1];
      if (std::abs(inner) <= 8 * eps * scale) {
        t.truncated = true;
        break;
      }
      const double den = std::pow(lengths[m + k] / lengths[m], omega) * (1.0 - d / inner) - 1.0;
      if (std::abs(den) <= 1e-12) {
        t.truncated = true;
        break;
      }
      col.push_back(prev[m + 1] + d / den);
    }
    if (t.truncated) break;
    before = prev;
    t.table.push_back(std::move(col));
  }
  const auto& last = t.table.back();
  t.limit = last.front();
  t.error_estimate = t.table.size() > 1 ? 2.0 * std::abs(last.front() - t.table[t.table.size() - 2].front()) : 0.0;
  return t;
}

BstTableau scan(const std::vector<double>& lengths, const std::vector<double>& values,
                const std::vector<double>& omegas, std::size_t min_entries) {
  if (omegas.empty()) throw DomainError("BST scan needs at least one omega");
  BstTableau best;
  bool have = false;
  for (double w : omegas) {
    BstTableau t = bst_core(lengths, values, w, min_entries);
    if (!have || t.error_estimate < best.error_estimate) {
      best = std::move(t);
      have = true;
    }
  }
  return best;
}

}  // namespace

BstTableau bst_extrapolate(const std::vector<double>& lengths, const std::vector<double>& values, double omega) {
  return bst_core(lengths, values, omega, 4);
}

BstTableau bst_scan(const std::vector<double>& lengths, const std::vector<double>& values,
                    const std::vector<double>& omegas) {
  return scan(lengths, values, omegas, 4);
}

ScalingStudy run_scaling_study(int l_min, int l_max, int step, const std::vector<double>& omegas,
                               const ContinuationOptions& opt,
                               const std::function<void(const BetheRootSet&, double)>& on_gap) {
  if (step != 3) throw DomainError("the p = L/3 sector needs step 3");
  if (l_min < 6 || l_min % 3 != 0 || l_max % 3 != 0 || l_max < l_min)
    throw DomainError("scaling range must satisfy 6 <= L_min <= L_max, both multiples of 3");
  const EnergyMap map;
  ScalingStudy study;
  study.series.source = SeriesSource::Bethe;

  try {
    gap_state_chain(l_max + step, opt, [&](const BetheRootSet& roots) {
      if (roots.length < l_min) return;
      double gap = energy_from_roots(roots, map).real();
      study.series.lengths.push_back(roots.length);
      study.series.gaps.push_back(gap);
      study.roots.push_back(roots);
      if (on_gap) on_gap(roots, gap);
    });
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("scaling study aborted: ") + e.what());
  }
  study.series.validate();
  study.extrapolants = local_exponent(study.series, step);
  std::vector<double> ls, vs;
  for (const auto& e : study.extrapolants) {
    ls.push_back(e.length);
    vs.push_back(e.value);
  }
  // short sweeps still get a (shallow) tableau
  study.tableau = scan(ls, vs, omegas, 2);
  study.z_estimate = -study.tableau.limit;
  study.error = study.tableau.error_estimate;
  return study;
}

}  // namespace tasep
