#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sparsereg::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;  // log10 bounds
  double px(double lx) const { return kLeft + (lx - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double ly) const { return kHeight - kBottom - (ly - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::string line(const Frame& f, double lx0, double ly0, double lx1, double ly1, const char* style) {
  return "<line x1=\"" + fmt("%.2f", f.px(lx0)) + "\" y1=\"" + fmt("%.2f", f.py(ly0)) + "\" x2=\"" +
         fmt("%.2f", f.px(lx1)) + "\" y2=\"" + fmt("%.2f", f.py(ly1)) + "\" " + style + "/>\n";
}

}  // namespace

std::string render_rate_svg(const SweepResult& sweep, double reference_slope) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const SweepRow& r : sweep.rows) {
    if (!(r.delta > 0.0) || !(r.error_norm > 0.0)) continue;
    xmin = std::min(xmin, std::log10(r.delta));
    xmax = std::max(xmax, std::log10(r.delta));
    ymin = std::min(ymin, std::log10(r.error_norm));
    ymax = std::max(ymax, std::log10(r.error_norm));
  }
  if (!std::isfinite(xmin)) {
    xmin = -4.0;
    xmax = -1.0;
    ymin = -4.0;
    ymax = 0.0;
  }
  Frame f{std::floor(xmin), std::ceil(xmax), std::floor(ymin), std::ceil(ymax)};
  if (f.x1 <= f.x0) f.x1 = f.x0 + 1.0;
  if (f.y1 <= f.y0) f.y1 = f.y0 + 1.0;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  s += "<clipPath id=\"plot\"><rect x=\"80\" y=\"40\" width=\"530\" height=\"380\"/></clipPath>\n";
  s += line(f, f.x0, f.y0, f.x1, f.y0, "stroke=\"black\"");
  s += line(f, f.x0, f.y0, f.x0, f.y1, "stroke=\"black\"");
  for (double d = f.x0; d <= f.x1 + 1e-9; d += 1.0) {
    s += line(f, d, f.y0, d, f.y1, "stroke=\"#dddddd\"");
    s += "<text x=\"" + fmt("%.2f", f.px(d)) + "\" y=\"" + fmt("%.2f", kHeight - kBottom + 20.0) +
         "\" font-size=\"12\" text-anchor=\"middle\">1e" + fmt("%.0f", d) + "</text>\n";
  }
  for (double d = f.y0; d <= f.y1 + 1e-9; d += 1.0) {
    s += line(f, f.x0, d, f.x1, d, "stroke=\"#dddddd\"");
    s += "<text x=\"" + fmt("%.2f", kLeft - 8.0) + "\" y=\"" + fmt("%.2f", f.py(d) + 4.0) +
         "\" font-size=\"12\" text-anchor=\"end\">1e" + fmt("%.0f", d) + "</text>\n";
  }
  s += "<text x=\"360\" y=\"470\" font-size=\"14\" text-anchor=\"middle\">noise level delta</text>\n";
  s += "<text x=\"20\" y=\"240\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 240)\">"
       "error |u - u+|</text>\n";

  for (const SweepRow& r : sweep.rows) {
    if (!(r.delta > 0.0) || !(r.error_norm > 0.0)) continue;
    s += "<circle cx=\"" + fmt("%.2f", f.px(std::log10(r.delta))) + "\" cy=\"" +
         fmt("%.2f", f.py(std::log10(r.error_norm))) + "\" r=\"2\" fill=\"#9ecae1\"/>\n";
  }
  double cx = 0.0;
  double cy = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < sweep.deltas.size(); ++k) {
    const double e = sweep.mean_errors[k];
    if (!(e > 0.0)) continue;
    const bool used = sweep.used_in_fit[k];
    s += "<circle cx=\"" + fmt("%.2f", f.px(std::log10(sweep.deltas[k]))) + "\" cy=\"" +
         fmt("%.2f", f.py(std::log10(e))) + "\" r=\"4\" fill=\"" + (used ? "#08519c" : "none") +
         "\" stroke=\"#08519c\"/>\n";
    cx += std::log10(sweep.deltas[k]);
    cy += std::log10(e);
    ++count;
  }

  std::string legend;
  s += "<g clip-path=\"url(#plot)\">\n";
  if (sweep.rate) {
    const double a = sweep.rate->slope;
    const double b = sweep.rate->intercept / std::log(10.0);
    s += line(f, f.x0, b + a * f.x0, f.x1, b + a * f.x1, "stroke=\"#08519c\" stroke-width=\"1.5\"");
    legend += "<text x=\"90\" y=\"25\" font-size=\"13\" fill=\"#08519c\">fit slope " +
              fmt("%.3f", a) + "</text>\n";
  }
  if (count > 0) {
    cx /= count;
    cy /= count;
    const double a = reference_slope;
    s += line(f, f.x0, cy + a * (f.x0 - cx), f.x1, cy + a * (f.x1 - cx),
              "stroke=\"#d94801\" stroke-dasharray=\"6 4\"");
    legend += "<text x=\"300\" y=\"25\" font-size=\"13\" fill=\"#d94801\">reference slope " +
              fmt("%.3f", a) + "</text>\n";
  }
  s += "</g>\n";
  s += legend;
  s += "</svg>\n";
  return s;
}

}  // namespace sparsereg::cli
