#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string_view>
#include <vector>

#include "music2d/core.hpp"
#include "music2d/geometry.hpp"
#include "music2d/special.hpp"
#include "music2d/subspace.hpp"

namespace music2d {

enum class SteeringScale { Raw, UnitNorm };

// f_n(z) = exp(i omega theta_n . z); raw norm sqrt(N), unit-norm variant 1.
template <typename Scalar>
struct SteeringVector {
  VectorXC<Scalar> f;
  SteeringScale scale{SteeringScale::Raw};
};

template <typename Scalar>
VectorXC<Scalar> steering_raw(const Vec2<Scalar>& z, Scalar omega,
                              const DirectionSet<Scalar>& dirs) {
  using C = std::complex<Scalar>;
  VectorXC<Scalar> f(dirs.size());
  for (Index n = 0; n < dirs.size(); ++n) {
    const Scalar phase = omega * dirs.vectors.col(n).dot(z);
    f(n) = C(std::cos(phase), std::sin(phase));
  }
  return f;
}

template <typename Scalar>
SteeringVector<Scalar> steering(const Vec2<Scalar>& z, Scalar omega,
                                const DirectionSet<Scalar>& dirs, SteeringScale scale) {
  SteeringVector<Scalar> out{steering_raw(z, omega, dirs), scale};
  if (scale == SteeringScale::UnitNorm) out.f /= std::sqrt(Scalar(dirs.size()));
  return out;
}

// Rectangular search grid; values live at pixel centers.
template <typename Scalar>
class ImageGrid {
 public:
  ImageGrid(Scalar xmin, Scalar xmax, Scalar ymin, Scalar ymax, Index nx, Index ny)
      : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), nx_(nx), ny_(ny) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("image grid: need nx, ny >= 2");
    if (!(xmax > xmin) || !(ymax > ymin))
      throw std::invalid_argument("image grid: empty extent");
  }

  Scalar xmin() const { return xmin_; }
  Scalar xmax() const { return xmax_; }
  Scalar ymin() const { return ymin_; }
  Scalar ymax() const { return ymax_; }
  Index nx() const { return nx_; }
  Index ny() const { return ny_; }
  Scalar dx() const { return (xmax_ - xmin_) / Scalar(nx_); }
  Scalar dy() const { return (ymax_ - ymin_) / Scalar(ny_); }
  Scalar x(Index ix) const { return xmin_ + (Scalar(ix) + Scalar(0.5)) * dx(); }
  Scalar y(Index iy) const { return ymin_ + (Scalar(iy) + Scalar(0.5)) * dy(); }
  Vec2<Scalar> center(Index ix, Index iy) const { return Vec2<Scalar>(x(ix), y(iy)); }

  Index nearest_x(Scalar xq) const {
    return std::clamp<Index>(static_cast<Index>(std::floor((xq - xmin_) / dx())), 0, nx_ - 1);
  }
  Index nearest_y(Scalar yq) const {
    return std::clamp<Index>(static_cast<Index>(std::floor((yq - ymin_) / dy())), 0, ny_ - 1);
  }

  friend bool operator==(const ImageGrid& a, const ImageGrid& b) {
    return a.xmin_ == b.xmin_ && a.xmax_ == b.xmax_ && a.ymin_ == b.ymin_ &&
           a.ymax_ == b.ymax_ && a.nx_ == b.nx_ && a.ny_ == b.ny_;
  }

 private:
  Scalar xmin_, xmax_, ymin_, ymax_;
  Index nx_, ny_;
};

using ImageGridd = ImageGrid<double>;

enum class MapKind {
  Music,
  Migration,
  PredictorEps,
  PredictorMu,
  PredictorEpsMu,
  PredictorTm,
  PredictorTe,
  PredictorSmallEps,
  PredictorSmallMu,
  PredictorSmallEpsMu,
};

constexpr std::string_view map_kind_name(MapKind kind) {
  switch (kind) {
    case MapKind::Music: return "music";
    case MapKind::Migration: return "migration";
    case MapKind::PredictorEps: return "predictor-eps";
    case MapKind::PredictorMu: return "predictor-mu";
    case MapKind::PredictorEpsMu: return "predictor-eps-mu";
    case MapKind::PredictorTm: return "predictor-tm";
    case MapKind::PredictorTe: return "predictor-te";
    case MapKind::PredictorSmallEps: return "predictor-small-eps";
    case MapKind::PredictorSmallMu: return "predictor-small-mu";
    case MapKind::PredictorSmallEpsMu: return "predictor-small-eps-mu";
  }
  return "unknown";
}

template <typename Scalar>
struct FieldMap {
  ImageGrid<Scalar> grid;
  MatrixX<Scalar> values;  // values(ix, iy)
  MapKind kind{MapKind::Music};
  Scalar cap{Scalar(1e6)};

  Scalar operator()(Index ix, Index iy) const { return values(ix, iy); }
  Scalar max_value() const { return values.maxCoeff(); }
  bool cap_hit() const { return (values.array() >= cap).any(); }
};

using FieldMapd = FieldMap<double>;

namespace detail {

template <typename Scalar>
void require_imageable(const SubspaceDecomposition<Scalar>& dec,
                       const DirectionSet<Scalar>& dirs, Scalar cap) {
  if (dec.u.rows() != dirs.size())
    throw std::invalid_argument("imaging: decomposition/direction size mismatch");
  if (!(cap > Scalar(0))) throw std::invalid_argument("imaging: cap must be positive");
  if (dec.signal_dim < 0 || dec.signal_dim > dec.size())
    throw std::invalid_argument("imaging: signal_dim out of range");
  if (dec.signal_dim == dec.size())
    throw std::domain_error("imaging: noise subspace is empty (signal_dim == N)");
}

// steering matrix for one grid row, one column per pixel
template <typename Scalar>
MatrixXC<Scalar> steering_row(const ImageGrid<Scalar>& grid, Index iy, Scalar omega,
                              const DirectionSet<Scalar>& dirs) {
  using C = std::complex<Scalar>;
  Mat2X<Scalar> pts(2, grid.nx());
  for (Index ix = 0; ix < grid.nx(); ++ix) pts.col(ix) = grid.center(ix, iy);
  const MatrixX<Scalar> phases = omega * (dirs.vectors.transpose() * pts);
  return (phases.template cast<C>() * C(0, 1)).array().exp().matrix();
}

}  // namespace detail

// MUSIC functional E(z) = 1 / |P_noise f(z)| with the raw steering vector;
// unbounded (no cap applied).
template <typename Scalar>
Scalar music_functional(const SubspaceDecomposition<Scalar>& dec, Scalar omega,
                        const DirectionSet<Scalar>& dirs, const Vec2<Scalar>& z) {
  return Scalar(1) / noise_projection_norm(dec, steering_raw(z, omega, dirs));
}

// E(z) over the grid, replaced by cap wherever |P_noise f(z)| < 1/cap.
template <typename Scalar>
FieldMap<Scalar> music_map(const SubspaceDecomposition<Scalar>& dec, Scalar omega,
                           const DirectionSet<Scalar>& dirs, const ImageGrid<Scalar>& grid,
                           Scalar cap) {
  detail::require_imageable(dec, dirs, cap);
  const Scalar n = Scalar(dirs.size());
  FieldMap<Scalar> out{grid, MatrixX<Scalar>::Zero(grid.nx(), grid.ny()), MapKind::Music, cap};
  const MatrixXC<Scalar> usig = dec.u.leftCols(dec.signal_dim).adjoint();
  for (Index iy = 0; iy < grid.ny(); ++iy) {
    const MatrixXC<Scalar> f = detail::steering_row(grid, iy, omega, dirs);
    const MatrixXC<Scalar> g = usig * f;
    for (Index ix = 0; ix < grid.nx(); ++ix) {
      const Scalar npn =
          std::sqrt(std::max(n - g.col(ix).squaredNorm(), Scalar(0)));
      out.values(ix, iy) = npn * cap < Scalar(1) ? cap : Scalar(1) / npn;
    }
  }
  return out;
}

// Subspace migration E_SM(z) = sum_{m<=signal_dim} |U_m^* fhat(z)|^2 with the
// unit-norm steering vector; values in [0, 1].
template <typename Scalar>
FieldMap<Scalar> migration_map(const SubspaceDecomposition<Scalar>& dec, Scalar omega,
                               const DirectionSet<Scalar>& dirs, const ImageGrid<Scalar>& grid) {
  detail::require_imageable(dec, dirs, Scalar(1));
  const Scalar n = Scalar(dirs.size());
  FieldMap<Scalar> out{grid, MatrixX<Scalar>::Zero(grid.nx(), grid.ny()), MapKind::Migration,
                       Scalar(1e6)};
  const MatrixXC<Scalar> usig = dec.u.leftCols(dec.signal_dim).adjoint();
  for (Index iy = 0; iy < grid.ny(); ++iy) {
    const MatrixXC<Scalar> f = detail::steering_row(grid, iy, omega, dirs);
    const MatrixXC<Scalar> g = usig * f;
    for (Index ix = 0; ix < grid.nx(); ++ix)
      out.values(ix, iy) = g.col(ix).squaredNorm() / n;
  }
  return out;
}

// Reading of the permeability-type directional weight: as the closed forms
// state it, (zhat.(t+n))^2, or summed per frame vector, (zhat.t)^2 + (zhat.n)^2.
enum class MuVariant { AsWritten, FrameSum };

// Closed-form Bessel predictors. All kinds evaluate
//   (1/sqrt(N)) * arg(z)^{-1/2}
// with the argument clamped below at 1/(N cap^2) so clamped pixels equal cap.
template <typename Scalar>
FieldMap<Scalar> predictor_map(MapKind kind, const SceneGeometry<Scalar>& geom, Scalar omega,
                               Index n_dirs, const ImageGrid<Scalar>& grid,
                               MuVariant variant = MuVariant::AsWritten,
                               Scalar cap = Scalar(1e6)) {
  if (kind == MapKind::Music || kind == MapKind::Migration)
    throw std::invalid_argument("predictor_map: kind must name a predictor");
  if (geom.empty()) throw std::invalid_argument("predictor_map: empty geometry");
  if (!(omega > Scalar(0)) || n_dirs < 2 || !(cap > Scalar(0)))
    throw std::invalid_argument("predictor_map: bad omega, N, or cap");

  const bool has_j0 = kind == MapKind::PredictorEps || kind == MapKind::PredictorTm ||
                      kind == MapKind::PredictorSmallEps || kind == MapKind::PredictorEpsMu ||
                      kind == MapKind::PredictorSmallEpsMu;
  const bool has_j1 = kind == MapKind::PredictorMu || kind == MapKind::PredictorTe ||
                      kind == MapKind::PredictorSmallMu || kind == MapKind::PredictorEpsMu ||
                      kind == MapKind::PredictorSmallEpsMu;
  // combined-contrast forms carry the J1 term with a plus sign
  const Scalar j1_sign =
      (kind == MapKind::PredictorEpsMu || kind == MapKind::PredictorSmallEpsMu) ? Scalar(1)
                                                                               : Scalar(-1);
  const bool fixed_basis =
      kind == MapKind::PredictorSmallMu || kind == MapKind::PredictorSmallEpsMu;

  const Index required = has_j0 && has_j1 ? 3 * geom.size()
                         : has_j1         ? 2 * geom.size()
                                          : geom.size();
  if (n_dirs <= required) {
    std::ostringstream msg;
    msg << "predictor_map: N = " << n_dirs << " does not exceed the hypothesis bound "
        << required << " for " << map_kind_name(kind);
    warn(msg.str());
  }

  const Vec2<Scalar> e1(1, 0), e2(0, 1);
  FieldMap<Scalar> out{grid, MatrixX<Scalar>::Zero(grid.nx(), grid.ny()), kind, cap};
  const Scalar floor = Scalar(1) / (cap * cap * Scalar(n_dirs));
  for (Index iy = 0; iy < grid.ny(); ++iy) {
    for (Index ix = 0; ix < grid.nx(); ++ix) {
      const Vec2<Scalar> z = grid.center(ix, iy);
      Scalar arg = 1;
      for (Index m = 0; m < geom.size(); ++m) {
        const Vec2<Scalar> d = z - geom.points.col(m);
        const Scalar r = d.norm();
        if (has_j0) {
          const Scalar j0 = bessel_j0(omega * r);
          arg -= j0 * j0;
        }
        if (has_j1 && r > Scalar(0)) {
          const Vec2<Scalar> zhat = d / r;
          const Vec2<Scalar> ta = fixed_basis ? e1 : Vec2<Scalar>(geom.tangents.col(m));
          const Vec2<Scalar> no = fixed_basis ? e2 : Vec2<Scalar>(geom.normals.col(m));
          Scalar weight;
          if (kind == MapKind::PredictorTe) {
            weight = zhat.dot(no) * zhat.dot(no);
          } else if (variant == MuVariant::FrameSum) {
            weight = zhat.dot(ta) * zhat.dot(ta) + zhat.dot(no) * zhat.dot(no);
          } else {
            const Scalar proj = zhat.dot(ta + no);
            weight = proj * proj;
          }
          const Scalar j1 = bessel_j1(omega * r);
          arg += j1_sign * weight * j1 * j1;
        }
      }
      out.values(ix, iy) = Scalar(1) / std::sqrt(Scalar(n_dirs) * std::max(arg, floor));
    }
  }
  return out;
}

template <typename Scalar>
struct CompareStats {
  Scalar median_rel_dev{0};
  Scalar max_rel_dev{0};
  Scalar argmax_distance{0};
  Index pixels{0};
};

using CompareStatsd = CompareStats<double>;

// Pixelwise relative deviation |b - a| / |a| over the included pixels, plus the
// distance between the two maps' included argmax locations.
template <typename Scalar, typename Include>
CompareStats<Scalar> compare_maps(const FieldMap<Scalar>& a, const FieldMap<Scalar>& b,
                                  Include&& include) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("compare_maps: grid mismatch");

  std::vector<Scalar> devs;
  devs.reserve(static_cast<std::size_t>(a.grid.nx() * a.grid.ny()));
  Scalar amax = -1, bmax = -1;
  Vec2<Scalar> apos = Vec2<Scalar>::Zero(), bpos = Vec2<Scalar>::Zero();
  for (Index iy = 0; iy < a.grid.ny(); ++iy) {
    for (Index ix = 0; ix < a.grid.nx(); ++ix) {
      const Vec2<Scalar> z = a.grid.center(ix, iy);
      if (!include(ix, iy, z)) continue;
      const Scalar va = a.values(ix, iy), vb = b.values(ix, iy);
      const Scalar denom = std::abs(va);
      devs.push_back(denom > Scalar(0)
                         ? std::abs(vb - va) / denom
                         : (vb == Scalar(0) ? Scalar(0)
                                            : std::numeric_limits<Scalar>::infinity()));
      if (va > amax) { amax = va; apos = z; }
      if (vb > bmax) { bmax = vb; bpos = z; }
    }
  }

  CompareStats<Scalar> stats;
  stats.pixels = static_cast<Index>(devs.size());
  if (devs.empty()) return stats;
  const auto mid = devs.begin() + devs.size() / 2;
  std::nth_element(devs.begin(), mid, devs.end());
  stats.median_rel_dev = *mid;
  stats.max_rel_dev = *std::max_element(devs.begin(), devs.end());
  stats.argmax_distance = (apos - bpos).norm();
  return stats;
}

template <typename Scalar>
CompareStats<Scalar> compare_maps(const FieldMap<Scalar>& a, const FieldMap<Scalar>& b) {
  return compare_maps(a, b, [](Index, Index, const Vec2<Scalar>&) { return true; });
}

template <typename Scalar>
struct Peak {
  Index ix, iy;
  Scalar value;
};

// 8-neighbourhood local maxima (ties allowed), sorted by value descending.
template <typename Scalar>
std::vector<Peak<Scalar>> find_local_maxima(const FieldMap<Scalar>& map) {
  std::vector<Peak<Scalar>> peaks;
  const auto& v = map.values;
  for (Index iy = 0; iy < map.grid.ny(); ++iy) {
    for (Index ix = 0; ix < map.grid.nx(); ++ix) {
      bool is_max = true;
      for (Index dy = -1; dy <= 1 && is_max; ++dy) {
        for (Index dx = -1; dx <= 1 && is_max; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const Index jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= map.grid.nx() || jy >= map.grid.ny()) continue;
          if (v(jx, jy) > v(ix, iy)) is_max = false;
        }
      }
      if (is_max) peaks.push_back({ix, iy, v(ix, iy)});
    }
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak<Scalar>& a, const Peak<Scalar>& b) { return a.value > b.value; });
  return peaks;
}

}  // namespace music2d
