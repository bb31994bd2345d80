#include "hessbif/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hessbif/errors.hpp"

namespace hessbif {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string render_branch_svg(const std::vector<Branch>& branches, const PlotOptions& opts) {
  if (branches.empty()) throw InvalidInput("plot: no branches");
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& b : branches) {
    if (b.points.empty()) throw InvalidInput("plot: branch without points");
    for (const auto& p : b.points) {
      if (!(p.d > 0) || !std::isfinite(p.lambda)) throw InvalidInput("plot: invalid branch point");
      xmin = std::min(xmin, std::log10(p.d));
      xmax = std::max(xmax, std::log10(p.d));
      ymin = std::min(ymin, p.lambda);
      ymax = std::max(ymax, p.lambda);
    }
  }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  // lambda axis from 0 so that (0, lambda*) bands are visible.
  ymin = 0.0;
  if (ymax <= 0) ymax = 1.0;
  ymax *= 1.1;

  const double W = opts.width, H = opts.height;
  const double left = 70, right = 20, top = 40, bottom = 50;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (y - ymin) / (ymax - ymin) * (H - top - bottom); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\"" << opts.height
    << "\" viewBox=\"0 0 " << opts.width << ' ' << opts.height << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << opts.width << "\" height=\"" << opts.height << "\" fill=\"white\"/>\n";

  // Band.
  std::optional<Interval> band = opts.shade;
  std::string band_label = "predicted interval";
  if (!band) {
    const auto& folds = branches.front().folds;
    double lmax = -1, lmin = -1;
    for (const auto& f : folds) {
      if (f.kind == FoldKind::Max) lmax = lmax < 0 ? f.lambda : std::min(lmax, f.lambda);
      if (f.kind == FoldKind::Min) lmin = std::max(lmin, f.lambda);
    }
    if (lmax > 0) {
      band = Interval{0.0, lmax};
      band_label = "two radial solutions below lambda* = " + label(lmax);
    } else if (lmin > 0) {
      band = Interval{lmin, INFINITY};
      band_label = "two radial solutions above lambda_* = " + label(lmin);
    }
  }
  if (band) {
    const double lo = std::clamp(band->lo, ymin, ymax), hi = std::clamp(band->hi, ymin, ymax);
    if (hi > lo)
      s << "<rect x=\"" << num(px(xmin)) << "\" y=\"" << num(py(hi)) << "\" width=\"" << num(px(xmax) - px(xmin))
        << "\" height=\"" << num(py(lo) - py(hi)) << "\" fill=\"#fdd49e\" fill-opacity=\"0.5\"/>\n";
    s << "<text x=\"" << num(left + 6) << "\" y=\"" << num(top - 8) << "\" font-size=\"12\">" << escape(band_label)
      << "</text>\n";
  }

  // Axes and ticks.
  s << "<g stroke=\"black\" stroke-width=\"1\">\n";
  s << "<line x1=\"" << num(left) << "\" y1=\"" << num(H - bottom) << "\" x2=\"" << num(W - right) << "\" y2=\""
    << num(H - bottom) << "\"/>\n";
  s << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\"" << num(H - bottom)
    << "\"/>\n";
  s << "</g>\n";
  s << "<g font-size=\"11\" text-anchor=\"middle\">\n";
  for (int e = static_cast<int>(std::ceil(xmin)); e <= static_cast<int>(std::floor(xmax)); ++e)
    s << "<text x=\"" << num(px(e)) << "\" y=\"" << num(H - bottom + 16) << "\">1e" << e << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = ymin + (ymax - ymin) * i / 5;
    s << "<text x=\"" << num(left - 30) << "\" y=\"" << num(py(y) + 4) << "\">" << label(y) << "</text>\n";
  }
  s << "<text x=\"" << num((left + W - right) / 2) << "\" y=\"" << num(H - 12) << "\">d = -u(0)</text>\n";
  s << "<text x=\"16\" y=\"" << num((top + H - bottom) / 2) << "\" transform=\"rotate(-90 16 "
    << num((top + H - bottom) / 2) << ")\">lambda</text>\n";
  s << "</g>\n";
  if (!opts.title.empty())
    s << "<text x=\"" << num(W / 2) << "\" y=\"18\" font-size=\"14\" text-anchor=\"middle\">" << escape(opts.title)
      << "</text>\n";

  // Curves and folds.
  for (std::size_t bi = 0; bi < branches.size(); ++bi) {
    const auto& b = branches[bi];
    const char* colour = kColours[bi % (sizeof kColours / sizeof kColours[0])];
    s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < b.points.size(); ++i)
      s << (i ? " " : "") << num(px(std::log10(b.points[i].d))) << ',' << num(py(b.points[i].lambda));
    s << "\"/>\n";
    for (const auto& f : b.folds)
      s << "<circle cx=\"" << num(px(std::log10(b.points[f.index].d))) << "\" cy=\"" << num(py(f.lambda))
        << "\" r=\"4\" fill=\"" << (f.kind == FoldKind::Max ? "#d62728" : "#2ca02c") << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace hessbif
