#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyembed/discrete_loss.hpp"

namespace polyembed {

// Fixes p[outcome] = value, leaving a triangle scaled back to the simplex.
struct Slice {
  std::size_t outcome = 0;
  Rational value;
};

// Parses "y4=1/4"; the text after "y" is an outcome label.
Slice parse_slice(const DiscreteLoss& loss, std::string_view text);

struct PlotCell {
  std::string report;
  std::vector<Vec> corners;  // barycentric coordinates on the three free outcomes, in cyclic order
  bool contained = true;     // inside some overlay cell
};

struct SimplexPlot {
  std::vector<std::string> corner_labels;
  std::vector<PlotCell> cells;
  std::vector<PlotCell> overlay;
  bool has_overlay = false;
};

// Full-dimensional level-set cells of a loss on three outcomes, or on four with a slice.
SimplexPlot simplex_plot(const DiscreteLoss& loss, const std::optional<Slice>& slice = std::nullopt,
                         const DiscreteLoss* overlay = nullptr);

// 800 x 693 canvas; corner i of the triangle is the point mass on free outcome i.
std::string render_svg(const SimplexPlot& plot);

}  // namespace polyembed
