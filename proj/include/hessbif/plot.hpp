#pragma once

// Static SVG bifurcation diagrams: log10 d on the horizontal axis, lambda on
// the vertical one, fold markers and a shaded multiplicity band.

#include <optional>
#include <string>
#include <vector>

#include "hessbif/branch.hpp"

namespace hessbif {

struct PlotOptions {
  std::optional<Interval> shade;  // overrides the fold-derived band
  std::string title;
  int width = 720;
  int height = 480;
};

/// Deterministic SVG text. Without an explicit band, a maximum fold shades
/// (0, lambda*) and a minimum fold shades (lambda_*, top). Throws InvalidInput
/// for an empty branch list or a branch without points.
std::string render_branch_svg(const std::vector<Branch>& branches, const PlotOptions& opts = {});

}  // namespace hessbif
