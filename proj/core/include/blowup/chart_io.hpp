#pragma once

// Chart files: one JSON document per chart holding the model text, the
// certified equilibrium, the eigenpairs, the coefficients and the radii
// certificate, so enclosures can be re-evaluated without recomputation.

#include <string>

#include "blowup/manifold.hpp"

namespace blowup {

std::string chart_to_json_string(const ManifoldChart& chart);
ManifoldChart chart_from_json_string(const std::string& text);

void save_chart(const ManifoldChart& chart, const std::string& path);
ManifoldChart load_chart(const std::string& path);

} // namespace blowup
