#pragma once

#include <vector>

#include "sgnav/vec2.hpp"

namespace sgnav {

// 1-D angular camera model: the image is treated as a horizontal sweep of
// `fov` radians across `image_width` pixels.
struct CameraModel {
  double fov = 1.5707963267948966;  // radians
  int image_width = 640;            // pixels
  int image_height = 480;           // pixels (carried, unused by the sweep)

  void validate() const;
};

// Detection centroid in pixels plus its depth in meters.
struct DepthBoundedBox {
  Vec2 centroid;      // (x_b, y_b) pixels
  double depth = 0.0;  // meters
};

using PlanarPosition = Vec2;  // robot-frame meters

// Angle of the detection measured from the left image edge:
// (x_b / width) * fov. A centered detection maps to fov/2.
double angular_displacement(const DepthBoundedBox& box, const CameraModel& cam);

// Planar position depth * (cos a, sin a) where a is the angular displacement.
// With `centered` the angle is shifted by -fov/2 so a centered detection lands
// straight ahead.
PlanarPosition localize(const DepthBoundedBox& box, const CameraModel& cam,
                        bool centered = false);

// Depth raster sampled at pixel coordinates; values in meters.
struct DepthGrid {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major

  double sample(double px, double py) const;  // nearest pixel, clamped
};

}  // namespace sgnav
