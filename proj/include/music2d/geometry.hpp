#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "music2d/core.hpp"

namespace music2d {

enum class CurveKind { Gamma1, Gamma2, Line, Polyline };

template <typename Scalar>
Vec2<Scalar> rotate90(const Vec2<Scalar>& v) {
  return Vec2<Scalar>(-v.y(), v.x());
}

template <typename Scalar>
struct CurveFrame {
  Vec2<Scalar> point;
  Vec2<Scalar> tangent;  // unit
  Vec2<Scalar> normal;   // tangent rotated +90 degrees
};

namespace detail {

// Adaptive Simpson with absolute tolerance; integrands here are curve speeds,
// smooth except at polyline vertices.
template <typename Scalar, typename F>
Scalar simpson_rec(const F& f, Scalar a, Scalar m, Scalar b, Scalar fa, Scalar fm, Scalar fb,
                   Scalar whole, Scalar tol, int depth) {
  const Scalar lm = (a + m) / 2, rm = (m + b) / 2;
  const Scalar flm = f(lm), frm = f(rm);
  const Scalar left = (m - a) / 6 * (fa + 4 * flm + fm);
  const Scalar right = (b - m) / 6 * (fm + 4 * frm + fb);
  const Scalar delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15;
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <typename Scalar, typename F>
Scalar adaptive_simpson(const F& f, Scalar a, Scalar b, Scalar rel_tol) {
  if (a == b) return Scalar(0);
  const Scalar m = (a + b) / 2;
  const Scalar fa = f(a), fm = f(m), fb = f(b);
  const Scalar whole = (b - a) / 6 * (fa + 4 * fm + fb);
  const Scalar tol = rel_tol * (std::abs(whole) + Scalar(1e-3));
  return simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, 52);
}

}  // namespace detail

// Parametric supporting curve. Presets carry exact closed-form evaluators;
// custom curves are dense polylines with central-difference tangents.
template <typename Scalar>
class CurveSpec {
 public:
  static CurveSpec gamma1() {
    CurveSpec c;
    c.kind_ = CurveKind::Gamma1;
    c.a_ = Scalar(-0.5);
    c.b_ = Scalar(0.5);
    return c;
  }

  static CurveSpec gamma2() {
    CurveSpec c;
    c.kind_ = CurveKind::Gamma2;
    c.a_ = Scalar(-1);
    c.b_ = Scalar(1);
    return c;
  }

  static CurveSpec line(const Vec2<Scalar>& from, const Vec2<Scalar>& to) {
    CurveSpec c;
    c.kind_ = CurveKind::Line;
    c.a_ = Scalar(0);
    c.b_ = Scalar(1);
    c.p0_ = from;
    c.p1_ = to;
    return c;
  }

  static CurveSpec polyline(std::vector<Vec2<Scalar>> points) {
    if (points.size() < 2) throw std::invalid_argument("polyline: need at least 2 points");
    CurveSpec c;
    c.kind_ = CurveKind::Polyline;
    c.a_ = Scalar(0);
    c.b_ = Scalar(points.size() - 1);
    c.pts_ = std::move(points);
    const std::size_t n = c.pts_.size();
    c.cumlen_.resize(n, Scalar(0));
    for (std::size_t k = 1; k < n; ++k) {
      const Scalar seg = (c.pts_[k] - c.pts_[k - 1]).norm();
      if (!(seg > Scalar(0)))
        throw std::invalid_argument("polyline: coincident consecutive points");
      c.cumlen_[k] = c.cumlen_[k - 1] + seg;
    }
    c.vtan_.resize(n);
    c.vtan_[0] = (c.pts_[1] - c.pts_[0]).normalized();
    for (std::size_t k = 1; k + 1 < n; ++k)
      c.vtan_[k] = (c.pts_[k + 1] - c.pts_[k - 1]).normalized();
    c.vtan_[n - 1] = (c.pts_[n - 1] - c.pts_[n - 2]).normalized();
    return c;
  }

  CurveKind kind() const { return kind_; }
  Scalar param_begin() const { return a_; }
  Scalar param_end() const { return b_; }

  Vec2<Scalar> point(Scalar s) const {
    check_param(s);
    switch (kind_) {
      case CurveKind::Gamma1:
        return Vec2<Scalar>(s + Scalar(0.2), s * s * s + s * s - Scalar(0.3));
      case CurveKind::Gamma2: {
        const Scalar half_pi = std::numbers::pi_v<Scalar> / 2;
        return Vec2<Scalar>(s, std::cos(half_pi * s) / 2 + std::sin(half_pi * s) / 5 -
                                   std::cos(3 * half_pi * s) / 10);
      }
      case CurveKind::Line:
        return p0_ + s * (p1_ - p0_);
      case CurveKind::Polyline: {
        const auto [k, u] = segment(s);
        return pts_[k] + u * (pts_[k + 1] - pts_[k]);
      }
    }
    throw std::logic_error("unreachable");
  }

  // dp/ds (not normalized)
  Vec2<Scalar> velocity(Scalar s) const {
    check_param(s);
    switch (kind_) {
      case CurveKind::Gamma1:
        return Vec2<Scalar>(Scalar(1), 3 * s * s + 2 * s);
      case CurveKind::Gamma2: {
        const Scalar half_pi = std::numbers::pi_v<Scalar> / 2;
        return Vec2<Scalar>(Scalar(1),
                            -half_pi / 2 * std::sin(half_pi * s) +
                                half_pi / 5 * std::cos(half_pi * s) +
                                3 * half_pi / 10 * std::sin(3 * half_pi * s));
      }
      case CurveKind::Line:
        return p1_ - p0_;
      case CurveKind::Polyline: {
        const auto [k, u] = segment(s);
        (void)u;
        return pts_[k + 1] - pts_[k];
      }
    }
    throw std::logic_error("unreachable");
  }

  CurveFrame<Scalar> frame(Scalar s) const {
    CurveFrame<Scalar> f;
    f.point = point(s);
    if (kind_ == CurveKind::Polyline) {
      const auto [k, u] = segment(s);
      const Vec2<Scalar> t = (Scalar(1) - u) * vtan_[k] + u * vtan_[k + 1];
      const Scalar norm = t.norm();
      f.tangent = norm > Scalar(0) ? Vec2<Scalar>(t / norm) : vtan_[k];
    } else {
      const Vec2<Scalar> v = velocity(s);
      const Scalar speed = v.norm();
      if (!(speed > Scalar(0))) throw InvalidGeometry("curve has zero velocity");
      f.tangent = v / speed;
    }
    f.normal = rotate90(f.tangent);
    return f;
  }

  Scalar arc_length() const { return cumulative_length(b_); }

  // arc length from param_begin() to s
  Scalar cumulative_length(Scalar s) const {
    check_param(s);
    if (kind_ == CurveKind::Polyline) {
      const auto [k, u] = segment(s);
      return cumlen_[k] + u * (cumlen_[k + 1] - cumlen_[k]);
    }
    const auto speed = [this](Scalar t) { return velocity(t).norm(); };
    return detail::adaptive_simpson(speed, a_, s, Scalar(1e-8));
  }

  // inverse of cumulative_length, by bisection on the smooth presets
  Scalar param_at_length(Scalar target) const {
    if (kind_ == CurveKind::Polyline) {
      const auto it = std::upper_bound(cumlen_.begin(), cumlen_.end(), target);
      const std::size_t k =
          std::min(pts_.size() - 2, static_cast<std::size_t>(
                                        std::max<std::ptrdiff_t>(0, it - cumlen_.begin() - 1)));
      const Scalar seg = cumlen_[k + 1] - cumlen_[k];
      const Scalar u = std::clamp((target - cumlen_[k]) / seg, Scalar(0), Scalar(1));
      return Scalar(k) + u;
    }
    Scalar lo = a_, hi = b_;
    for (int it = 0; it < 200 && hi - lo > (b_ - a_) * Scalar(1e-14); ++it) {
      const Scalar mid = (lo + hi) / 2;
      (cumulative_length(mid) < target ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
  }

 private:
  CurveSpec() = default;

  void check_param(Scalar s) const {
    const Scalar slack = (b_ - a_) * Scalar(1e-12);
    if (!(s >= a_ - slack && s <= b_ + slack))
      throw std::domain_error("curve parameter outside domain");
  }

  std::pair<std::size_t, Scalar> segment(Scalar s) const {
    const Scalar clamped = std::clamp(s, a_, b_);
    const auto k = std::min(pts_.size() - 2, static_cast<std::size_t>(std::max(
                                                 Scalar(0), std::floor(clamped))));
    return {k, clamped - Scalar(k)};
  }

  CurveKind kind_{CurveKind::Line};
  Scalar a_{0}, b_{1};
  Vec2<Scalar> p0_ = Vec2<Scalar>::Zero(), p1_ = Vec2<Scalar>::Zero();
  std::vector<Vec2<Scalar>> pts_;
  std::vector<Vec2<Scalar>> vtan_;
  std::vector<Scalar> cumlen_;
};

// Discretized supporting curve: one sample per arc-length segment, with the
// local orthonormal frame at each sample.
template <typename Scalar>
struct SceneGeometry {
  Mat2X<Scalar> points;
  Mat2X<Scalar> tangents;
  Mat2X<Scalar> normals;
  Scalar curve_length{0};
  Scalar spacing{0};  // realized inter-point arc length

  Index size() const { return points.cols(); }
  bool empty() const { return points.cols() == 0; }

  void validate(Scalar tol = Scalar(1e-12)) const {
    if (points.cols() != tangents.cols() || points.cols() != normals.cols())
      throw InvalidGeometry("scene geometry: inconsistent column counts");
    if (!(curve_length > Scalar(0)) || !(spacing > Scalar(0)))
      throw InvalidGeometry("scene geometry: non-positive length or spacing");
    for (Index m = 0; m < size(); ++m) {
      const Vec2<Scalar> t = tangents.col(m), n = normals.col(m);
      if (std::abs(t.norm() - 1) > tol || std::abs(n.norm() - 1) > tol ||
          std::abs(t.dot(n)) > tol)
        throw InvalidGeometry("scene geometry: frame not orthonormal");
    }
    const auto expected =
        std::max(Index{1}, static_cast<Index>(std::llround(double(curve_length / spacing))));
    if (expected != size()) throw InvalidGeometry("scene geometry: point count mismatch");
  }
};

using SceneGeometryd = SceneGeometry<double>;

// N equispaced unit directions (cos 2n pi/N, sin 2n pi/N), n = 1..N.
template <typename Scalar>
struct DirectionSet {
  Mat2X<Scalar> vectors;

  Index size() const { return vectors.cols(); }
};

using DirectionSetd = DirectionSet<double>;

template <typename Scalar = double>
DirectionSet<Scalar> sample_directions(Index n) {
  if (n < 2) throw std::invalid_argument("sample_directions: need at least 2 directions");
  DirectionSet<Scalar> set;
  set.vectors.resize(2, n);
  for (Index k = 0; k < n; ++k) {
    const Scalar angle = 2 * std::numbers::pi_v<Scalar> * Scalar(k + 1) / Scalar(n);
    set.vectors.col(k) = Vec2<Scalar>(std::cos(angle), std::sin(angle));
  }
  return set;
}

template <typename Scalar>
CurveFrame<Scalar> eval_curve(const CurveSpec<Scalar>& spec, Scalar s) {
  return spec.frame(s);
}

// Arc-length discretization: M = max(1, round(L/spacing)) samples at the
// arc-length midpoints (m - 1/2) L / M.
template <typename Scalar>
SceneGeometry<Scalar> discretize_curve(const CurveSpec<Scalar>& spec, Scalar spacing) {
  if (!(spacing > Scalar(0)))
    throw std::invalid_argument("discretize_curve: spacing must be positive");
  const Scalar length = spec.arc_length();
  if (!(length > Scalar(1e-12))) throw InvalidGeometry("discretize_curve: degenerate curve");

  const Index count =
      std::max(Index{1}, static_cast<Index>(std::llround(double(length / spacing))));
  SceneGeometry<Scalar> geom;
  geom.points.resize(2, count);
  geom.tangents.resize(2, count);
  geom.normals.resize(2, count);
  for (Index m = 0; m < count; ++m) {
    const Scalar target = (Scalar(m) + Scalar(0.5)) * length / Scalar(count);
    const auto frame = spec.frame(spec.param_at_length(target));
    geom.points.col(m) = frame.point;
    geom.tangents.col(m) = frame.tangent;
    geom.normals.col(m) = frame.normal;
  }
  geom.curve_length = length;
  geom.spacing = length / Scalar(count);
  geom.validate();
  return geom;
}

// Frame-agnostic wrapper for bare point sets (small-inclusion centers).
template <typename Scalar>
SceneGeometry<Scalar> point_set_geometry(const Mat2X<Scalar>& points) {
  if (points.cols() == 0) throw std::invalid_argument("point_set_geometry: empty point set");
  SceneGeometry<Scalar> geom;
  geom.points = points;
  geom.tangents = Mat2X<Scalar>::Zero(2, points.cols());
  geom.normals = Mat2X<Scalar>::Zero(2, points.cols());
  geom.tangents.row(0).setOnes();
  geom.normals.row(1).setOnes();
  geom.curve_length = Scalar(points.cols());
  geom.spacing = Scalar(1);
  geom.validate();
  return geom;
}

}  // namespace music2d
