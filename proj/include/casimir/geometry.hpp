#pragma once

#include <cmath>
#include <limits>

#include "casimir/materials.hpp"

namespace casimir {

// Two spheres of radii r1, r2 at surface-to-surface distance gap; r2 may be
// +infinity for the plane-sphere geometry.
struct Geometry {
  double r1;
  double r2;
  double gap;

  static Geometry plane_sphere(double radius, double gap) {
    return {radius, std::numeric_limits<double>::infinity(), gap};
  }

  bool is_plane_sphere() const { return std::isinf(r2) || std::isinf(r1); }
  // R1 + R2 + L (center to center); infinite for the plane.
  double center_distance() const { return r1 + r2 + gap; }
  double r_eff() const {
    if (std::isinf(r2)) return r1;
    if (std::isinf(r1)) return r2;
    return r1 * r2 / (r1 + r2);
  }
  // min(R1, R2) / (R1 + R2) in [0, 1/2]
  double mu() const {
    if (is_plane_sphere()) return 0.0;
    return std::min(r1, r2) / (r1 + r2);
  }
};

void validate(const Geometry& g);

struct MaterialPair {
  DielectricModel first;
  DielectricModel second;
};

// Temperature and Matsubara frequencies xi_n = 2 pi n k_B T / hbar.
struct ThermalSpec {
  double temperature;  // K

  double matsubara(int n) const;
  double thermal_wavelength() const;  // hbar c / (k_B T), +infinity at T = 0
};

}  // namespace casimir
