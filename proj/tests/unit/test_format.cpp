#include <doctest.h>

#include <cstdlib>

#include "tasep/errors.hpp"
#include "tasep/format.hpp"

using namespace tasep;

TEST_SUITE("format") {

TEST_CASE("doubles round-trip") {
  for (double x : {0.1, 1.0 / 3.0, -1.5518961566109, 6.02214076e23, 5e-324}) {
    auto s = format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(format_double(2.0) == "2");
  double y = 0.526438516646494;
  nlohmann::json j = y;
  CHECK(nlohmann::json::parse(j.dump()).get<double>() == y);
}

TEST_CASE("spectrum summary") {
  auto frozen = spectrum_summary(dense_spectrum(build_hamiltonian_tasep(Sector{3, 3, 0, {}})));
  CHECK(frozen["gap_present"] == false);
  CHECK(frozen["gap_re"].is_null());
  CHECK(frozen["gap_im"].is_null());
  CHECK(frozen["method"] == "dense");
  CHECK(frozen["k"].is_null());

  auto six = spectrum_summary(dense_spectrum(build_hamiltonian_tasep(Sector{6, 2, 2, {}})));
  CHECK(six["gap_re"].get<double>() > 0.0);
  CHECK(six["eigenvalue_count"] == 90);
  CHECK(six["zero_count"] == 1);
  CHECK_FALSE(six.contains("max_residual"));

  std::vector<std::string> keys;
  for (auto& [k, v] : six.items()) keys.push_back(k);
  CHECK(std::is_sorted(keys.begin(), keys.end()));
}

TEST_CASE("root sets survive a round trip") {
  auto s = solve_bethe(6, 2, 0, gap_state_integers(2), {});
  auto j = root_set_json(s, EnergyMap{});
  auto back = root_set_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.length == 6);
  CHECK(back.m == s.m);
  for (int k = 0; k < 2; ++k) CHECK(std::abs(back.z[k] - s.z[k]) <= 1e-14);
  CHECK(j["energy"][0].get<double>() > 0.0);
  CHECK(j["Y"].empty());

  CHECK_THROWS_AS(root_set_from_json(nlohmann::json::parse(R"({"L": 6})")), DomainError);
  auto wrong = j;
  wrong["p"] = 3;
  CHECK_THROWS_AS(root_set_from_json(wrong), DomainError);
}

TEST_CASE("curve csv") {
  auto s = solve_bethe(6, 2, 0, gap_state_integers(2), {});
  auto csv = root_curve_csv(s, true);
  CHECK(csv.rfind("re,im\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  auto first = csv.substr(6, csv.find('\n', 6) - 6);
  CHECK(std::strtod(first.c_str(), nullptr) == s.z[0].real());
}

TEST_CASE("tableau json") {
  auto t = bst_extrapolate({1, 2, 3, 4}, {1.0, 1.0, 1.0, 1.0}, 1.0);
  auto j = tableau_json(t);
  CHECK(j["limit"] == 1.0);
  CHECK(j["error"] == 0.0);
  CHECK(j["table"].size() == 4);
  CHECK(j["truncated"] == false);
}

}
