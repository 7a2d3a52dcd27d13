#pragma once

#include <string>
#include <vector>

#include "uavrelay/geometry.hpp"

namespace uavrelay {

// Minimal SVG canvas in world coordinates (meters, y pointing up).  The
// canvas flips the y axis so SVG output matches the usual plot orientation.
class SvgCanvas {
 public:
  SvgCanvas(double world_min_x, double world_min_y, double world_max_x, double world_max_y,
            int pixel_width);

  void rect(double x, double y, double w, double h, const std::string& fill,
            double opacity = 1.0);
  void circle(const Point2& center, double radius_px, const std::string& fill);
  void polyline(const std::vector<Point2>& pts, const std::string& stroke, double width_px);
  void text(const Point2& at, const std::string& label, int size_px = 12,
            const std::string& fill = "#000000");

  // Serialized document; call once at the end.
  std::string str() const;
  void save(const std::string& path) const;

 private:
  double px(double x) const;
  double py(double y) const;

  double min_x_, min_y_, max_x_, max_y_;
  double scale_;
  int width_px_, height_px_;
  std::string body_;
};

// Blue->yellow->red color ramp over [0, 1] as an SVG color string.
std::string heat_color(double t);

}  // namespace uavrelay
