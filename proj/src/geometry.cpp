#include "sgnav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sgnav {

void CameraModel::validate() const {
  if (!(fov > 0.0) || !(fov < std::numbers::pi))
    throw std::invalid_argument("camera fov must be in (0, pi)");
  if (image_width <= 0) throw std::invalid_argument("camera image_width must be positive");
  if (image_height <= 0) throw std::invalid_argument("camera image_height must be positive");
}

double angular_displacement(const DepthBoundedBox& box, const CameraModel& cam) {
  cam.validate();
  const double w = static_cast<double>(cam.image_width);
  if (box.centroid.x < 0.0 || box.centroid.x > w)
    throw std::invalid_argument("bounding-box centroid x outside image: " +
                                std::to_string(box.centroid.x));
  return (box.centroid.x / w) * cam.fov;
}

PlanarPosition localize(const DepthBoundedBox& box, const CameraModel& cam, bool centered) {
  if (!(box.depth > 0.0)) throw std::invalid_argument("depth must be positive");
  double angle = angular_displacement(box, cam);
  if (centered) angle -= cam.fov / 2.0;
  return {box.depth * std::cos(angle), box.depth * std::sin(angle)};
}

double DepthGrid::sample(double px, double py) const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("empty depth grid");
  const int col = std::clamp(static_cast<int>(std::lround(px)), 0, width - 1);
  const int row = std::clamp(static_cast<int>(std::lround(py)), 0, height - 1);
  return values[static_cast<std::size_t>(row) * width + col];
}

}  // namespace sgnav
