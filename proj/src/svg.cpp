#include "uavrelay/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace uavrelay {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

}  // namespace

SvgCanvas::SvgCanvas(double world_min_x, double world_min_y, double world_max_x,
                     double world_max_y, int pixel_width)
    : min_x_(world_min_x), min_y_(world_min_y), max_x_(world_max_x), max_y_(world_max_y) {
  if (!(max_x_ > min_x_) || !(max_y_ > min_y_) || pixel_width < 16)
    throw std::invalid_argument("svg canvas: degenerate world window");
  width_px_ = pixel_width;
  scale_ = pixel_width / (max_x_ - min_x_);
  height_px_ = static_cast<int>(std::lround((max_y_ - min_y_) * scale_));
}

double SvgCanvas::px(double x) const { return (x - min_x_) * scale_; }
double SvgCanvas::py(double y) const { return (max_y_ - y) * scale_; }

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill,
                     double opacity) {
  body_ += fmt("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\"", px(x), py(y + h),
               w * scale_, h * scale_);
  body_ += " fill=\"" + fill + "\"";
  if (opacity < 1.0) body_ += fmt(" fill-opacity=\"%.3f\"", opacity);
  body_ += "/>\n";
}

void SvgCanvas::circle(const Point2& center, double radius_px, const std::string& fill) {
  body_ += fmt("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\"", px(center.x), py(center.y), radius_px);
  body_ += " fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<Point2>& pts, const std::string& stroke,
                         double width_px) {
  if (pts.size() < 2) return;
  body_ += "<polyline points=\"";
  for (const Point2& p : pts) body_ += fmt("%.2f,%.2f ", px(p.x), py(p.y));
  body_ += "\" fill=\"none\" stroke=\"" + stroke + "\"";
  body_ += fmt(" stroke-width=\"%.2f\"/>\n", width_px);
}

void SvgCanvas::text(const Point2& at, const std::string& label, int size_px,
                     const std::string& fill) {
  body_ += fmt("<text x=\"%.2f\" y=\"%.2f\"", px(at.x), py(at.y));
  body_ += " font-size=\"" + std::to_string(size_px) + "\" fill=\"" + fill + "\">";
  body_ += label + "</text>\n";
}

std::string SvgCanvas::str() const {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(width_px_) + "\" height=\"" + std::to_string(height_px_) +
                    "\" viewBox=\"0 0 " + std::to_string(width_px_) + " " +
                    std::to_string(height_px_) + "\">\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

void SvgCanvas::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write svg: " + path);
  out << str();
}

std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  // Piecewise-linear ramp: dark blue -> cyan -> yellow -> red.
  double r, g, b;
  if (t < 1.0 / 3.0) {
    const double u = t * 3.0;
    r = 0.05, g = 0.2 + 0.6 * u, b = 0.55 + 0.35 * u;
  } else if (t < 2.0 / 3.0) {
    const double u = t * 3.0 - 1.0;
    r = 0.05 + 0.9 * u, g = 0.8 + 0.1 * u, b = 0.9 - 0.8 * u;
  } else {
    const double u = t * 3.0 - 2.0;
    r = 0.95, g = 0.9 - 0.75 * u, b = 0.1 - 0.05 * u;
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(r * 255)),
                static_cast<int>(std::lround(g * 255)), static_cast<int>(std::lround(b * 255)));
  return buf;
}

}  // namespace uavrelay
