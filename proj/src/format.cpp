#include "tasep/format.hpp"

#include <cmath>
#include <cstdio>

#include "tasep/errors.hpp"

namespace tasep {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json pair(Complex c) { return json::array({c.real(), c.imag()}); }

json pairs(const std::vector<Complex>& v) {
  json a = json::array();
  for (Complex c : v) a.push_back(pair(c));
  return a;
}

Complex read_pair(const json& j) {
  if (!j.is_array() || j.size() != 2) throw DomainError("expected a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json spectrum_summary(const SpectrumResult& r) {
  json j;
  j["L"] = r.length;
  if (r.sector) {
    j["n_A"] = r.sector->n_a;
    j["n_B"] = r.sector->n_b;
    j["k"] = r.sector->momentum ? json(*r.sector->momentum) : json(nullptr);
  } else {
    j["n_A"] = nullptr;
    j["n_B"] = nullptr;
    j["k"] = nullptr;
  }
  if (r.gap) {
    j["gap_re"] = r.gap->real();
    j["gap_im"] = r.gap->imag();
  } else {
    j["gap_re"] = nullptr;
    j["gap_im"] = nullptr;
  }
  j["gap_present"] = r.gap.has_value();
  j["method"] = to_string(r.method);
  j["zero_count"] = r.zero_count;
  j["eigenvalue_count"] = r.eigenvalues.size();
  if (r.method == SpectrumMethod::Krylov) {
    j["max_residual"] = r.max_residual;
    j["steady_state_deflated"] = r.steady_state_deflated;
  }
  return j;
}

json root_set_json(const BetheRootSet& roots, const EnergyMap& map) {
  json j;
  j["L"] = roots.length;
  j["p"] = roots.p();
  j["r"] = roots.r();
  j["I"] = roots.m;
  j["I_second"] = roots.n;
  j["lambda"] = pairs(roots.lambda());
  j["Lambda"] = pairs(roots.big_lambda());
  j["Z"] = pairs(roots.z);
  j["Y"] = pairs(roots.y);
  j["energy_raw"] = pair(energy_raw(roots));
  j["energy"] = pair(energy_from_roots(roots, map));
  j["residual_norm"] = roots.residual_norm;
  return j;
}

BetheRootSet root_set_from_json(const json& j) {
  try {
    BetheRootSet s;
    s.length = j.at("L").get<int>();
    s.m = j.at("I").get<std::vector<int>>();
    if (j.contains("I_second")) s.n = j.at("I_second").get<std::vector<int>>();
    for (const auto& v : j.at("lambda")) s.z.push_back(std::exp(2.0 * read_pair(v)));
    if (j.contains("Lambda"))
      for (const auto& v : j.at("Lambda")) s.y.push_back(std::exp(2.0 * read_pair(v)));
    if (j.contains("p") && j.at("p").get<int>() != s.p()) throw DomainError("p does not match the lambda list");
    if (j.contains("r") && j.at("r").get<int>() != s.r()) throw DomainError("r does not match the Lambda list");
    return s;
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed root-set JSON: ") + e.what());
  }
}

json tableau_json(const BstTableau& t) {
  json j;
  j["omega"] = t.omega;
  j["limit"] = t.limit;
  j["error"] = t.error_estimate;
  j["truncated"] = t.truncated;
  j["table"] = t.table;
  return j;
}

std::string root_curve_csv(const BetheRootSet& roots, bool squared) {
  std::string out = "re,im\n";
  auto values = squared ? roots.z : roots.lambda();
  for (Complex c : values) out += format_double(c.real()) + "," + format_double(c.imag()) + "\n";
  return out;
}

}  // namespace tasep
