#ifndef SLIDESEG_REPORT_SVG_PLOTS_HPP
#define SLIDESEG_REPORT_SVG_PLOTS_HPP

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slideseg/report/kde.hpp"

namespace slideseg {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string rgb_hex(int r, int g, int b) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

// small blue-to-yellow colour map for density shading
inline std::string density_colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(40 + t * (253 - 40));
  const int g = static_cast<int>(60 + t * (231 - 60));
  const int b = static_cast<int>(140 + t * (37 - 140));
  return rgb_hex(r, g, b);
}

struct SvgWriter {
  std::ostringstream body;
  double width;
  double height;

  SvgWriter(double w, double h) : width(w), height(h) {}

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0, const std::string& dash = "") {
    body << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
         << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
         << fmt(stroke_width) << "\"";
    if (!dash.empty()) body << " stroke-dasharray=\"" << dash << "\"";
    body << "/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill,
            double opacity = 1.0) {
    body << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
         << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\" fill-opacity=\""
         << fmt(opacity) << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill, double opacity = 1.0) {
    body << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(r)
         << "\" fill=\"" << fill << "\" fill-opacity=\"" << fmt(opacity) << "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill,
               const std::string& stroke) {
    body << "<polygon points=\"";
    for (const auto& [x, y] : pts) body << fmt(x) << "," << fmt(y) << " ";
    body << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\" fill-opacity=\"0.55\"/>\n";
  }

  void text(double x, double y, const std::string& s, double size = 12.0,
            const std::string& anchor = "middle") {
    body << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << fmt(size)
         << "\" text-anchor=\"" << anchor << "\" font-family=\"sans-serif\">" << s
         << "</text>\n";
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("svg: cannot write " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
        << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " "
        << fmt(height) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body.str() << "</svg>\n";
  }
};

}  // namespace detail

struct ViolinGroup {
  std::string name;
  std::vector<double> values;
};

/// Violin plot: per group a Gaussian-KDE outline, the interquartile range as
/// a light box, the mean as a black horizontal line, the median as a dashed
/// line, and a point overlay. Groups render left to right in input order.
inline void plot_violin(const std::vector<ViolinGroup>& groups, const std::string& out_path) {
  if (groups.empty()) throw std::invalid_argument("plot_violin: no groups");
  for (const ViolinGroup& g : groups)
    if (g.values.size() < 2)
      throw std::invalid_argument("plot_violin: group '" + g.name + "' needs n >= 2");

  const double margin = 50.0;
  const double slot = 120.0;
  const double width = margin * 2 + slot * static_cast<double>(groups.size());
  const double height = 420.0;
  detail::SvgWriter svg(width, height);

  double vmin = groups[0].values[0];
  double vmax = vmin;
  for (const ViolinGroup& g : groups)
    for (double v : g.values) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  if (vmax == vmin) {
    vmin -= 0.5;
    vmax += 0.5;
  }
  const double pad = 0.05 * (vmax - vmin);
  vmin -= pad;
  vmax += pad;
  auto to_y = [&](double v) {
    return height - margin - (v - vmin) / (vmax - vmin) * (height - 2 * margin);
  };

  // axis
  svg.line(margin, margin, margin, height - margin, "black");
  for (int i = 0; i <= 4; ++i) {
    const double v = vmin + (vmax - vmin) * i / 4.0;
    svg.line(margin - 4, to_y(v), margin, to_y(v), "black");
    svg.text(margin - 8, to_y(v) + 4, detail::fmt(v), 10, "end");
  }

  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const ViolinGroup& g = groups[gi];
    const double cx = margin + slot * (static_cast<double>(gi) + 0.5);
    const double h = scott_bandwidth(g.values);
    double lo = *std::min_element(g.values.begin(), g.values.end()) - 3.0 * h;
    double hi = *std::max_element(g.values.begin(), g.values.end()) + 3.0 * h;
    if (hi == lo) {
      lo -= 1e-6;
      hi += 1e-6;
    }
    const int steps = 100;
    std::vector<double> density(steps + 1);
    double dmax = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double v = lo + (hi - lo) * i / steps;
      density[i] = kde_1d(g.values, h, v);
      dmax = std::max(dmax, density[i]);
    }
    const double half_width = slot * 0.42;
    std::vector<std::pair<double, double>> outline;
    for (int i = 0; i <= steps; ++i) {
      const double v = lo + (hi - lo) * i / steps;
      outline.emplace_back(cx - half_width * density[i] / dmax, to_y(v));
    }
    for (int i = steps; i >= 0; --i) {
      const double v = lo + (hi - lo) * i / steps;
      outline.emplace_back(cx + half_width * density[i] / dmax, to_y(v));
    }
    svg.polygon(outline, "#9ecae1", "#3182bd");

    const double q1 = quantile(g.values, 0.25);
    const double q3 = quantile(g.values, 0.75);
    const double med = quantile(g.values, 0.5);
    double mean = std::accumulate(g.values.begin(), g.values.end(), 0.0) /
                  static_cast<double>(g.values.size());
    const double box_w = slot * 0.12;
    svg.rect(cx - box_w / 2, to_y(q3), box_w, std::max(0.5, to_y(q1) - to_y(q3)), "#dddddd", 0.9);
    svg.line(cx - box_w, to_y(med), cx + box_w, to_y(med), "#555555", 1.0, "3,2");
    svg.line(cx - box_w * 1.4, to_y(mean), cx + box_w * 1.4, to_y(mean), "black", 2.0);
    for (double v : g.values) svg.circle(cx, to_y(v), 1.6, "#08306b", 0.5);
    svg.text(cx, height - margin + 18, g.name, 12);
  }
  svg.save(out_path);
}

/// Scatter over [0,1]^2 coloured by 2-D Gaussian KDE density, with the
/// identity diagonal drawn for paired-score comparisons.
inline void plot_scatter_density(const std::vector<double>& x, const std::vector<double>& y,
                                 const std::string& out_path) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("plot_scatter_density: need equal lengths, n >= 2");

  const double margin = 50.0;
  const double plot = 400.0;
  detail::SvgWriter svg(plot + 2 * margin, plot + 2 * margin);
  auto to_px = [&](double v) { return margin + v * plot; };
  auto to_py = [&](double v) { return margin + (1.0 - v) * plot; };

  svg.line(margin, margin + plot, margin + plot, margin + plot, "black");
  svg.line(margin, margin, margin, margin + plot, "black");
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    svg.text(to_px(v), margin + plot + 16, detail::fmt(v), 10);
    svg.text(margin - 8, to_py(v) + 4, detail::fmt(v), 10, "end");
  }
  // identity diagonal: equal score on both axes
  svg.line(to_px(0.0), to_py(0.0), to_px(1.0), to_py(1.0), "#888888", 1.0, "5,3");

  const double hx = scott_bandwidth(x, 2);
  const double hy = scott_bandwidth(y, 2);
  std::vector<double> density(x.size());
  double dmin = 0.0;
  double dmax = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    density[i] = kde_2d(x, y, hx, hy, x[i], y[i]);
    if (i == 0) {
      dmin = dmax = density[i];
    } else {
      dmin = std::min(dmin, density[i]);
      dmax = std::max(dmax, density[i]);
    }
  }
  const double span = dmax > dmin ? dmax - dmin : 1.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    svg.circle(to_px(x[i]), to_py(y[i]), 3.0,
               detail::density_colour((density[i] - dmin) / span), 0.85);
  svg.save(out_path);
}

}  // namespace slideseg

#endif  // SLIDESEG_REPORT_SVG_PLOTS_HPP
