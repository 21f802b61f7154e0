#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace tvpf::plot {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

Frame make_frame(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  return {x0, x1, y0 - pad, y1 + pad};
}

std::string open_svg(const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                  "\" height=\"" + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
       title + "</text>\n";
  return s;
}

std::string axes(const Frame& f, const std::string& x_label, const std::string& y_label) {
  std::string s;
  const double left = kLeft, right = kWidth - kRight, top = kTop, bottom = kHeight - kBottom;
  s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(right - left) +
       "\" height=\"" + num(bottom - top) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 5.0;
    const double yv = f.y0 + (f.y1 - f.y0) * k / 5.0;
    s += "<text x=\"" + num(f.px(xv)) + "\" y=\"" + num(bottom + 16) +
         "\" text-anchor=\"middle\">" + label(xv) + "</text>\n";
    s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(f.py(yv) + 4) +
         "\" text-anchor=\"end\">" + label(yv) + "</text>\n";
  }
  s += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num(kHeight - 12) +
       "\" text-anchor=\"middle\">" + x_label + "</text>\n";
  s += "<text x=\"16\" y=\"" + num((top + bottom) / 2) + "\" transform=\"rotate(-90 16 " +
       num((top + bottom) / 2) + ")\" text-anchor=\"middle\">" + y_label + "</text>\n";
  return s;
}

std::string polyline(const Frame& f, const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& style) {
  std::string s = "<polyline fill=\"none\" " + style + " points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) s += num(f.px(x[i])) + "," + num(f.py(y[i])) + " ";
  return s + "\"/>\n";
}

std::string band_polygon(const Frame& f, const std::vector<double>& x,
                         const std::vector<double>& lo, const std::vector<double>& hi,
                         const std::string& fill) {
  std::string s = "<polygon fill=\"" + fill + "\" stroke=\"none\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) s += num(f.px(x[i])) + "," + num(f.py(hi[i])) + " ";
  for (std::size_t i = x.size(); i-- > 0;) s += num(f.px(x[i])) + "," + num(f.py(lo[i])) + " ";
  return s + "\"/>\n";
}

}  // namespace

std::string label(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.3g", value);
  return buffer;
}

std::string band_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<double>& t,
                       const std::vector<double>& truth, const std::vector<Band>& bands) {
  std::vector<double> mean, lo68, hi68, lo95, hi95;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    mean.push_back(bands[i].mean);
    lo68.push_back(bands[i].lo68);
    hi68.push_back(bands[i].hi68);
    lo95.push_back(bands[i].lo95);
    hi95.push_back(bands[i].hi95);
    lo = std::min({lo, bands[i].lo95, truth[i]});
    hi = std::max({hi, bands[i].hi95, truth[i]});
  }
  const Frame f = make_frame(t.front(), t.back(), lo, hi);
  std::string s = open_svg(title);
  s += band_polygon(f, t, lo95, hi95, "#c6dbef");
  s += band_polygon(f, t, lo68, hi68, "#6baed6");
  s += polyline(f, t, mean, "stroke=\"#08519c\" stroke-width=\"1.5\"");
  s += polyline(f, t, truth, "stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"");
  s += axes(f, x_label, y_label);
  return s + "</svg>\n";
}

std::string histogram_chart(const std::string& title, const std::string& x_label,
                            const Histogram& hist) {
  const double top = *std::max_element(hist.mass.begin(), hist.mass.end());
  const Frame f = make_frame(hist.edges.front(), hist.edges.back(), 0.0, top);
  std::string s = open_svg(title);
  for (std::size_t b = 0; b < hist.mass.size(); ++b) {
    const double x = f.px(hist.edges[b]);
    const double w = f.px(hist.edges[b + 1]) - x;
    const double y = f.py(hist.mass[b]);
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
         num(f.py(0.0) - y) + "\" fill=\"#6baed6\" stroke=\"#08519c\"/>\n";
  }
  s += axes(f, x_label, "weight");
  return s + "</svg>\n";
}

std::string heatmap_chart(const std::string& title, const std::vector<double>& times,
                          const std::vector<double>& xs, const Eigen::MatrixXd& values) {
  const Frame f = make_frame(times.front(), times.back(), xs.front(), xs.back());
  const double top = values.size() > 0 ? values.maxCoeff() : 1.0;
  std::string s = open_svg(title);
  // At most ~400 columns so the file stays small.
  const std::size_t stride = std::max<std::size_t>(1, times.size() / 400);
  const double cell_h = (f.py(f.y0) - f.py(f.y1)) / static_cast<double>(xs.size());
  for (std::size_t j = 0; j < times.size(); j += stride) {
    const std::size_t next = std::min(j + stride, times.size() - 1);
    const double x = f.px(times[j]);
    const double w = std::max(1.0, f.px(times[next]) - x);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double v = values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      const double level = top > 0.0 ? std::clamp(v / top, 0.0, 1.0) : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - level)));
      char color[16];
      std::snprintf(color, sizeof color, "#ff%02x%02x", shade, shade);
      s += "<rect x=\"" + num(x) + "\" y=\"" + num(f.py(xs[i]) - cell_h / 2) + "\" width=\"" +
           num(w) + "\" height=\"" + num(cell_h) + "\" fill=\"" + color + "\"/>\n";
    }
  }
  s += axes(f, "t", "x");
  s += "<text x=\"" + num(kWidth - kRight) + "\" y=\"" + num(kTop - 6) +
       "\" text-anchor=\"end\">max " + label(top) + "</text>\n";
  return s + "</svg>\n";
}

}  // namespace tvpf::plot
