#pragma once

#include <string>

#include <json.hpp>

#include "tasep/bethe.hpp"
#include "tasep/scaling.hpp"
#include "tasep/spectra.hpp"

namespace tasep {

std::string format_double(double x);  // %.17g

nlohmann::json spectrum_summary(const SpectrumResult& r);
nlohmann::json root_set_json(const BetheRootSet& roots, const EnergyMap& map);
BetheRootSet root_set_from_json(const nlohmann::json& j);
nlohmann::json tableau_json(const BstTableau& t);

// One "re,im" line per root; Z-plane when `squared`, lambda-plane otherwise.
std::string root_curve_csv(const BetheRootSet& roots, bool squared);

}  // namespace tasep
