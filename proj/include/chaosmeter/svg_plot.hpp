#pragma once

#include <span>
#include <string>
#include <utility>

#include "chaosmeter/estimators.hpp"

namespace chaosmeter {

/// Log-log scatter plot with the fitted power law drawn through it and the
/// slope annotated. Pure function of its inputs: the same data always
/// yields byte-identical SVG. Throws NonPositiveData on nonpositive
/// coordinates; fit errors (e.g. DegenerateDesign for a single point)
/// propagate from fit_rate.
std::string render_loglog(std::span<const std::pair<double, double>> points,
                          const std::string& x_label, const std::string& y_label,
                          const std::string& title = "");

}  // namespace chaosmeter
