/**
 * @file geometry.hpp
 * @brief Canonical domains (ball, annulus, half-ball) and exact distance queries.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace pucci {

template <int Dim>
using Point = std::array<double, Dim>;

template <int Dim>
double dot(const Point<Dim>& a, const Point<Dim>& b) {
  double s = 0.0;
  for (int k = 0; k < Dim; ++k) s += a[k] * b[k];
  return s;
}

template <int Dim>
double norm(const Point<Dim>& a) {
  return std::sqrt(dot<Dim>(a, a));
}

template <std::size_t N>
std::array<double, N> operator-(const std::array<double, N>& a, const std::array<double, N>& b) {
  std::array<double, N> r{};
  for (std::size_t k = 0; k < N; ++k) r[k] = a[k] - b[k];
  return r;
}

template <std::size_t N>
std::array<double, N> operator+(const std::array<double, N>& a, const std::array<double, N>& b) {
  std::array<double, N> r{};
  for (std::size_t k = 0; k < N; ++k) r[k] = a[k] + b[k];
  return r;
}

template <std::size_t N>
std::array<double, N> operator*(double s, const std::array<double, N>& a) {
  std::array<double, N> r{};
  for (std::size_t k = 0; k < N; ++k) r[k] = s * a[k];
  return r;
}

template <int Dim>
double distance(const Point<Dim>& a, const Point<Dim>& b) {
  return norm<Dim>(a - b);
}

enum class DomainKind { ball, annulus, half_ball };

/// Boundary components of the canonical domains.
enum class BoundaryPart { outer_sphere, inner_sphere, flat };

inline std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::ball: return "ball";
    case DomainKind::annulus: return "annulus";
    case DomainKind::half_ball: return "half-ball";
  }
  return "?";
}

inline DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "ball") return DomainKind::ball;
  if (s == "annulus") return DomainKind::annulus;
  if (s == "half-ball" || s == "half_ball") return DomainKind::half_ball;
  throw std::invalid_argument("unknown domain kind '" + s + "'");
}

inline std::string to_string(BoundaryPart p) {
  switch (p) {
    case BoundaryPart::outer_sphere: return "outer";
    case BoundaryPart::inner_sphere: return "inner";
    case BoundaryPart::flat: return "flat";
  }
  return "?";
}

template <int Dim>
struct BoundaryHit {
  double s;  // ray parameter of the first boundary crossing
  BoundaryPart part;
};

/**
 * Ball B_r(c), annulus {r/2 < |x-c| < r}, or half-ball B_r(c) ∩ {x_n > c_n}.
 *
 * The annulus inner radius is always half the outer radius and the flat
 * boundary of the half-ball is the hyperplane through the center orthogonal
 * to the last axis.
 */
template <int Dim>
class DomainDescriptor {
  static_assert(Dim >= 2, "dimension must be at least 2");

 public:
  DomainDescriptor(DomainKind kind, double outer_radius, Point<Dim> center = {})
      : kind_(kind), center_(center), outer_radius_(outer_radius) {
    if (!(outer_radius > 0.0) || !std::isfinite(outer_radius))
      throw std::invalid_argument("domain radius must be positive and finite");
  }

  static DomainDescriptor ball(double r, Point<Dim> c = {}) { return {DomainKind::ball, r, c}; }
  static DomainDescriptor annulus(double r, Point<Dim> c = {}) { return {DomainKind::annulus, r, c}; }
  static DomainDescriptor half_ball(double r, Point<Dim> c = {}) { return {DomainKind::half_ball, r, c}; }

  DomainKind kind() const { return kind_; }
  const Point<Dim>& center() const { return center_; }
  double outer_radius() const { return outer_radius_; }
  double inner_radius() const { return kind_ == DomainKind::annulus ? 0.5 * outer_radius_ : 0.0; }
  static constexpr int dimension() { return Dim; }

  /// Height above the flat boundary (half-ball) or the last coordinate relative to the center.
  double height(const Point<Dim>& x) const { return x[Dim - 1] - center_[Dim - 1]; }

  /// Signed distance to the full boundary: positive inside, negative outside.
  double signed_distance(const Point<Dim>& x) const {
    const double rho = distance<Dim>(x, center_);
    double d = outer_radius_ - rho;
    if (kind_ == DomainKind::annulus) d = std::min(d, rho - inner_radius());
    if (kind_ == DomainKind::half_ball) {
      const double z = height(x);
      if (z >= 0.0 || d < 0.0) {
        d = std::min(d, z);
      } else {
        // below the plane: distance to the flat disc (or its rim)
        Point<Dim> p = x;
        p[Dim - 1] = center_[Dim - 1];
        const double radial = distance<Dim>(p, center_);
        const double lateral = std::max(0.0, radial - outer_radius_);
        d = -std::sqrt(lateral * lateral + z * z);
      }
    }
    return d;
  }

  bool contains(const Point<Dim>& x, double tol = 0.0) const { return signed_distance(x) > tol; }
  bool in_closure(const Point<Dim>& x, double tol = 1e-12) const {
    return signed_distance(x) >= -tol * outer_radius_;
  }

  /// Volume of the domain.
  double measure() const {
    const double ball = unit_ball_volume() * std::pow(outer_radius_, Dim);
    switch (kind_) {
      case DomainKind::ball: return ball;
      case DomainKind::annulus: return ball * (1.0 - std::pow(0.5, Dim));
      case DomainKind::half_ball: return 0.5 * ball;
    }
    return ball;
  }

  static double unit_ball_volume() {
    return std::pow(M_PI, 0.5 * Dim) / std::tgamma(0.5 * Dim + 1.0);
  }

  /**
   * First crossing of the boundary along x + s*v for s in (0, smax].
   * x must lie in the domain.
   */
  std::optional<BoundaryHit<Dim>> first_exit(const Point<Dim>& x, const Point<Dim>& v,
                                             double smax) const {
    std::optional<BoundaryHit<Dim>> best;
    auto consider = [&](double s, BoundaryPart part) {
      if (s > 0.0 && s <= smax && (!best || s < best->s)) best = BoundaryHit<Dim>{s, part};
    };
    const Point<Dim> w = x - center_;
    const double a = dot<Dim>(v, v);
    const double b = dot<Dim>(v, w);
    {
      const double c = dot<Dim>(w, w) - outer_radius_ * outer_radius_;
      const double disc = b * b - a * c;
      if (disc >= 0.0) {
        // positive root of a s^2 + 2 b s + c = 0 with c <= 0
        const double sq = std::sqrt(disc);
        const double s = (b <= 0.0) ? (-b + sq) / a : -c / (b + sq);
        consider(s, BoundaryPart::outer_sphere);
      }
    }
    if (kind_ == DomainKind::annulus) {
      const double ri = inner_radius();
      const double c = dot<Dim>(w, w) - ri * ri;
      const double disc = b * b - a * c;
      if (disc >= 0.0 && b < 0.0) {
        // smaller positive root, stable form
        const double s = c / (-b + std::sqrt(disc));
        consider(s, BoundaryPart::inner_sphere);
      }
    }
    if (kind_ == DomainKind::half_ball && v[Dim - 1] < 0.0) {
      consider(-height(x) / v[Dim - 1], BoundaryPart::flat);
    }
    return best;
  }

  bool operator==(const DomainDescriptor&) const = default;

 private:
  DomainKind kind_;
  Point<Dim> center_;
  double outer_radius_;
};

/// Distance from x to the given boundary component; x must lie in the closure.
template <int Dim>
double dist_to_part(const Point<Dim>& x, const DomainDescriptor<Dim>& dom, BoundaryPart part) {
  if (!dom.in_closure(x)) throw std::domain_error("point lies outside the domain closure");
  const double rho = distance<Dim>(x, dom.center());
  switch (part) {
    case BoundaryPart::outer_sphere: return std::max(0.0, dom.outer_radius() - rho);
    case BoundaryPart::inner_sphere:
      if (dom.kind() != DomainKind::annulus)
        throw std::invalid_argument("only the annulus has an inner sphere");
      return std::max(0.0, rho - dom.inner_radius());
    case BoundaryPart::flat:
      if (dom.kind() != DomainKind::half_ball)
        throw std::invalid_argument("only the half-ball has a flat boundary");
      return std::max(0.0, dom.height(x));
  }
  return 0.0;
}

/// Euclidean distance from x to the full boundary of the domain.
template <int Dim>
double dist_to_boundary(const Point<Dim>& x, const DomainDescriptor<Dim>& dom) {
  if (!dom.in_closure(x)) throw std::domain_error("point lies outside the domain closure");
  return std::max(0.0, dom.signed_distance(x));
}

}  // namespace pucci
