#include "polyembed/plot.hpp"

#include <algorithm>
#include <cstdio>

#include "polyembed/errors.hpp"

namespace polyembed {

namespace {

constexpr double side = 720;
constexpr double left = 40;
constexpr double bottom = 673;
constexpr double height = 623.5382907247958;  // side * sqrt(3) / 2

struct Chart {
  std::vector<std::size_t> free;  // outcomes drawn as triangle corners
  std::optional<Slice> slice;
};

Chart chart_for(const DiscreteLoss& loss, const std::optional<Slice>& slice) {
  const std::size_t n = loss.outcome_count();
  if (!(n == 3 && !slice) && !(n == 4 && slice)) {
    throw UnsupportedDimension("plots need three outcomes, or four with a slice");
  }
  Chart chart{{}, slice};
  for (std::size_t y = 0; y < n; ++y) {
    if (!slice || y != slice->outcome) chart.free.push_back(y);
  }
  return chart;
}

Polyhedron sliced(Polyhedron region, const Chart& chart) {
  if (chart.slice) region.add_equality(unit_vector(region.dimension(), chart.slice->outcome), chart.slice->value);
  return region;
}

Vec barycentric(const Vec& p, const Chart& chart) {
  Rational mass = 1;
  if (chart.slice) mass -= chart.slice->value;
  Vec out;
  for (auto y : chart.free) out.push_back(p[y] / mass);
  return out;
}

// Orders corners counterclockwise around their centroid using exact cross products.
void cyclic_order(std::vector<Vec>& corners) {
  Rational cx = 0, cy = 0;
  for (const auto& c : corners) {
    cx += c[1];
    cy += c[2];
  }
  cx /= static_cast<long>(corners.size());
  cy /= static_cast<long>(corners.size());
  auto half = [&](const Vec& c) {
    Rational dx = c[1] - cx, dy = c[2] - cy;
    return sgn(dy) > 0 || (sgn(dy) == 0 && sgn(dx) > 0) ? 0 : 1;
  };
  std::sort(corners.begin(), corners.end(), [&](const Vec& a, const Vec& b) {
    int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    Rational cross = (a[1] - cx) * (b[2] - cy) - (a[2] - cy) * (b[1] - cx);
    return sgn(cross) > 0;
  });
}

struct SlicedCell {
  std::string report;
  Polyhedron region;
};

std::vector<SlicedCell> sliced_cells(const DiscreteLoss& loss, const Chart& chart) {
  std::vector<SlicedCell> out;
  for (auto r : trim(loss).reports) {
    auto region = sliced(level_set(loss, r).region, chart);
    if (affine_dimension(region) != 2) continue;
    out.push_back({loss.reports()[r], std::move(region)});
  }
  return out;
}

PlotCell plot_cell(const SlicedCell& cell, const Chart& chart) {
  PlotCell out{cell.report, {}, true};
  for (const auto& v : polyhedron_vertices(cell.region).vertices) out.corners.push_back(barycentric(v, chart));
  cyclic_order(out.corners);
  return out;
}

std::string number(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", x);
  return buffer;
}

std::pair<double, double> canvas(const Vec& b) {
  double second = b[1].get_d(), third = b[2].get_d();
  return {left + side * (second + third / 2), bottom - height * third};
}

std::string points_attribute(const std::vector<Vec>& corners) {
  std::string out;
  for (const auto& c : corners) {
    auto [x, y] = canvas(c);
    if (!out.empty()) out += ' ';
    out += number(x) + "," + number(y);
  }
  return out;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Slice parse_slice(const DiscreteLoss& loss, std::string_view text) {
  auto eq = text.find('=');
  if (text.empty() || text[0] != 'y' || eq == std::string_view::npos) {
    throw ParseError("slice must look like y4=1/4");
  }
  std::string label(text.substr(1, eq - 1));
  const auto& outcomes = loss.outcomes();
  auto it = std::find(outcomes.begin(), outcomes.end(), label);
  if (it == outcomes.end()) throw ParseError("unknown outcome \"" + label + "\" in slice");
  Slice slice{static_cast<std::size_t>(it - outcomes.begin()), parse_rational(text.substr(eq + 1))};
  if (sgn(slice.value) < 0 || slice.value >= 1) throw DomainError("slice value must lie in [0, 1)");
  return slice;
}

SimplexPlot simplex_plot(const DiscreteLoss& loss, const std::optional<Slice>& slice, const DiscreteLoss* overlay) {
  const Chart chart = chart_for(loss, slice);
  if (overlay && overlay->outcomes() != loss.outcomes()) throw DomainError("overlay uses different outcomes");
  SimplexPlot plot;
  for (auto y : chart.free) plot.corner_labels.push_back(loss.outcomes()[y]);
  auto cells = sliced_cells(loss, chart);
  std::vector<SlicedCell> overlay_cells;
  if (overlay) {
    plot.has_overlay = true;
    overlay_cells = sliced_cells(*overlay, chart);
    for (const auto& cell : overlay_cells) plot.overlay.push_back(plot_cell(cell, chart));
  }
  for (const auto& cell : cells) {
    auto drawn = plot_cell(cell, chart);
    if (overlay) {
      drawn.contained = std::any_of(overlay_cells.begin(), overlay_cells.end(),
                                    [&](const SlicedCell& outer) { return contains(outer.region, cell.region); });
    }
    plot.cells.push_back(std::move(drawn));
  }
  return plot;
}

std::string render_svg(const SimplexPlot& plot) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"693\" viewBox=\"0 0 800 693\">\n"
      "<rect width=\"800\" height=\"693\" fill=\"white\"/>\n";
  for (const auto& cell : plot.cells) {
    out += "<polygon points=\"" + points_attribute(cell.corners) + "\" fill=\"" +
           (cell.contained ? "none" : "#d0d0d0") + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  for (const auto& cell : plot.overlay) {
    out += "<polygon points=\"" + points_attribute(cell.corners) +
           "\" fill=\"none\" stroke=\"#c03030\" stroke-width=\"1.5\" stroke-dasharray=\"8,5\"/>\n";
  }
  for (const auto& cell : plot.cells) {
    Vec centroid(3, Rational(0));
    for (const auto& c : cell.corners) {
      for (std::size_t i = 0; i < 3; ++i) centroid[i] += c[i];
    }
    for (auto& x : centroid) x /= static_cast<long>(cell.corners.size());
    auto [x, y] = canvas(centroid);
    out += "<text x=\"" + number(x) + "\" y=\"" + number(y) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" + escape(cell.report) + "</text>\n";
  }
  const Vec corners[] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const double dx[] = {-14, 14, 0}, dy[] = {16, 16, -10};
  for (std::size_t i = 0; i < 3; ++i) {
    auto [x, y] = canvas(corners[i]);
    out += "<text x=\"" + number(x + dx[i]) + "\" y=\"" + number(y + dy[i]) +
           "\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">" + escape(plot.corner_labels[i]) +
           "</text>\n";
  }
  out += "<polygon points=\"" + points_attribute({corners[0], corners[1], corners[2]}) +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n</svg>\n";
  return out;
}

}  // namespace polyembed
