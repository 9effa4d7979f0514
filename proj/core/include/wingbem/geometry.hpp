//
// wingbem -- Analytic NACA 0012 wing surface.
//
#pragma once

#include "wingbem/types.hpp"

#include <Eigen/Core>

namespace wingbem {

enum class TipCap { flat, rounded };
enum class TeClosure { closed, open };

struct WingSpec {
  double chord = 1.0;
  double span = 4.0;
  double alpha_deg = 0.0;
  double sweep_deg = 0.0;
  TipCap tip_cap = TipCap::rounded;
  TeClosure te_closure = TeClosure::closed;

  /// Throws DomainError when a field violates its invariant.
  void validate() const;
  double aspect_ratio() const { return span / chord; }
};

struct SurfaceSample {
  Vec3 position;
  Vec3 unit_normal;
  Vec2 param;
};

/// Half-thickness fraction of the 12% four-digit section at chordwise fraction xc.
double naca_half_thickness(double xc, TeClosure closure);

/**
 * Parametric wing surface. u runs spanwise (tip caps included at both ends),
 * v wraps windward TE (0) -> LE (0.5) -> leeward TE (1). The chordwise
 * fraction is (2v-1)^2, which keeps the parametrization smooth through the LE.
 */
class WingGeometry {
 public:
  explicit WingGeometry(const WingSpec& spec);

  const WingSpec& spec() const { return spec_; }
  /// Parametric width of each tip-cap band in u.
  double cap_param() const { return cap_u_; }
  bool in_cap(double u) const { return u < cap_u_ || u > 1.0 - cap_u_; }

  Vec3 position(const Vec2& uv) const;
  void derivatives(const Vec2& uv, Vec3& du, Vec3& dv) const;
  SurfaceSample sample(const Vec2& uv) const;
  Vec3 normal(const Vec2& uv) const;

  /**
   * Closest point by box-constrained damped Newton started at hint.
   * The box is the hint's side (windward/leeward) and, for flat caps, the
   * hint's spanwise band.
   */
  SurfaceSample project(const Vec3& p, const Vec2& hint) const;

  /// Rigid placement of section coordinates (sweep about z, then pitch about y).
  Vec3 to_world(const Vec3& local) const { return rotation_ * local; }
  Vec3 to_local(const Vec3& world) const { return rotation_.transpose() * world; }
  /// Unit chord direction (LE to TE) in world coordinates.
  Vec3 chord_direction() const { return rotation_.col(0); }
  /// Unit spanwise direction in world coordinates.
  Vec3 span_direction() const { return rotation_.col(1); }

 private:
  void local_eval(const Vec2& uv, Vec3* p, Vec3* du, Vec3* dv) const;

  WingSpec spec_;
  double cap_u_;
  Eigen::Matrix3d rotation_;
};

SurfaceSample surface_point(const WingSpec& spec, double u, double v);
SurfaceSample project_to_surface(const WingSpec& spec, const Vec3& p, const Vec2& hint);

}  // namespace wingbem
