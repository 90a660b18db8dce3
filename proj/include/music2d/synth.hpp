#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "music2d/core.hpp"
#include "music2d/geometry.hpp"

namespace music2d {

// Inclusion/background material pair; the background is fixed at eps0 = mu0 = 1.
template <typename Scalar>
struct MaterialContrast {
  Scalar eps{5};
  Scalar mu{1};
  Scalar h{0.02};  // half-thickness

  void validate() const {
    if (!(eps > Scalar(0) && mu > Scalar(0) && h > Scalar(0)))
      throw std::invalid_argument("material contrast: eps, mu, h must be positive");
  }
};

using MaterialContrastd = MaterialContrast<double>;

template <typename Scalar>
struct SmallInclusion {
  Vec2<Scalar> center = Vec2<Scalar>::Zero();
  Scalar radius{0.05};
  Scalar area{std::numbers::pi_v<Scalar>};  // area of the unit-scale domain B
  Mat2<Scalar> tensor = Mat2<Scalar>::Zero();
  Scalar eps{5};

  // standard disk polarization tensor for permeability contrast mu
  static Mat2<Scalar> disk_tensor(Scalar mu, Scalar area) {
    return 2 * area * (mu - 1) / (mu + 1) * Mat2<Scalar>::Identity();
  }

  void validate() const {
    if (!(radius > Scalar(0)) || !(area > Scalar(0)))
      throw std::invalid_argument("small inclusion: radius and area must be positive");
    if ((tensor - tensor.transpose()).template lpNorm<Eigen::Infinity>() > Scalar(1e-12))
      throw std::invalid_argument("small inclusion: polarization tensor must be symmetric");
  }
};

using SmallInclusiond = SmallInclusion<double>;

enum class MsrModel { Thin, Small, CrackSoft, CrackHard };
enum class CrackBoundary { SoundSoft, SoundHard };

// N x N multistatic response matrix; symmetric (unconjugated transpose).
template <typename Scalar>
struct MsrMatrix {
  MatrixXC<Scalar> matrix;
  MsrModel model{MsrModel::Thin};
  Scalar omega{0};
  Scalar scale{0};  // h for thin, r for small, 0 for cracks
  Index source_points{0};

  Index size() const { return matrix.rows(); }
};

using MsrMatrixd = MsrMatrix<double>;

// Far-field amplitude prefactor omega^2 (1+i) / (4 sqrt(omega pi)).
template <typename Scalar>
std::complex<Scalar> farfield_prefactor(Scalar omega) {
  const Scalar mag = omega * omega / (4 * std::sqrt(omega * std::numbers::pi_v<Scalar>));
  return std::complex<Scalar>(mag, mag);
}

namespace detail {

template <typename Scalar>
VectorXC<Scalar> phase_vector(const DirectionSet<Scalar>& dirs, const Vec2<Scalar>& x,
                              Scalar omega) {
  using C = std::complex<Scalar>;
  VectorXC<Scalar> out(dirs.size());
  for (Index n = 0; n < dirs.size(); ++n) {
    const Scalar phase = omega * dirs.vectors.col(n).dot(x);
    out(n) = C(std::cos(phase), std::sin(phase));
  }
  return out;
}

// standard-normal deviate with an explicit uint64 -> double mapping, so noise
// is reproducible across standard libraries
inline double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;        // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

// Thin-inclusion data model:
//   K_jl = h C(omega) (L/M) sum_m [ 2(1/mu - 1)(th_j.t)(th_l.t)
//                                 + 2(1 - mu)(th_j.n)(th_l.n) + (eps - 1) ]
//          exp(i omega (th_j + th_l) . x_m)
template <typename Scalar>
MsrMatrix<Scalar> msr_thin(const SceneGeometry<Scalar>& geom, const MaterialContrast<Scalar>& mat,
                           Scalar omega, const DirectionSet<Scalar>& dirs) {
  using C = std::complex<Scalar>;
  if (geom.empty()) throw std::invalid_argument("msr_thin: empty geometry");
  if (!(omega > Scalar(0))) throw std::invalid_argument("msr_thin: omega must be positive");
  mat.validate();

  const Index n = dirs.size();
  const C coef =
      mat.h * farfield_prefactor(omega) * (geom.curve_length / Scalar(geom.size()));
  const Scalar wt = 2 * (1 / mat.mu - 1);
  const Scalar wn = 2 * (1 - mat.mu);
  const Scalar we = mat.eps - 1;

  MsrMatrix<Scalar> out;
  out.matrix = MatrixXC<Scalar>::Zero(n, n);
  out.model = MsrModel::Thin;
  out.omega = omega;
  out.scale = mat.h;
  out.source_points = geom.size();
  for (Index m = 0; m < geom.size(); ++m) {
    const VectorXC<Scalar> e = detail::phase_vector(dirs, Vec2<Scalar>(geom.points.col(m)), omega);
    const VectorX<Scalar> at = dirs.vectors.transpose() * geom.tangents.col(m);
    const VectorX<Scalar> an = dirs.vectors.transpose() * geom.normals.col(m);
    const VectorXC<Scalar> ut = (at.template cast<C>().array() * e.array()).matrix();
    const VectorXC<Scalar> un = (an.template cast<C>().array() * e.array()).matrix();
    out.matrix.noalias() += (coef * wt) * (ut * ut.transpose());
    out.matrix.noalias() += (coef * wn) * (un * un.transpose());
    out.matrix.noalias() += (coef * we) * (e * e.transpose());
  }
  return out;
}

// Small-inclusion data model:
//   K_jl = r^2 C(omega) sum_m |B_m| [ th_j . A(x_m) . th_l + (eps - 1) ]
//          exp(i omega (th_j + th_l) . x_m)
template <typename Scalar>
MsrMatrix<Scalar> msr_small(const std::vector<SmallInclusion<Scalar>>& inclusions, Scalar omega,
                            const DirectionSet<Scalar>& dirs) {
  using C = std::complex<Scalar>;
  if (inclusions.empty()) throw std::invalid_argument("msr_small: empty inclusion list");
  if (!(omega > Scalar(0))) throw std::invalid_argument("msr_small: omega must be positive");
  for (const auto& inc : inclusions) inc.validate();

  const Scalar half_wavelength = std::numbers::pi_v<Scalar> / omega;
  for (std::size_t a = 0; a < inclusions.size(); ++a)
    for (std::size_t b = a + 1; b < inclusions.size(); ++b)
      if ((inclusions[a].center - inclusions[b].center).norm() < half_wavelength) {
        std::ostringstream msg;
        msg << "msr_small: inclusions " << a << " and " << b
            << " are closer than half a wavelength";
        warn(msg.str());
      }

  const Index n = dirs.size();
  const C pref = farfield_prefactor(omega);
  MsrMatrix<Scalar> out;
  out.matrix = MatrixXC<Scalar>::Zero(n, n);
  out.model = MsrModel::Small;
  out.omega = omega;
  out.source_points = static_cast<Index>(inclusions.size());
  for (const auto& inc : inclusions) {
    out.scale = std::max(out.scale, inc.radius);
    const VectorXC<Scalar> e = detail::phase_vector(dirs, inc.center, omega);
    const MatrixX<Scalar> quad =
        dirs.vectors.transpose() * inc.tensor * dirs.vectors;  // th_j . A . th_l
    const C coef = pref * (inc.radius * inc.radius * inc.area);
    out.matrix.noalias() +=
        coef * ((quad.array() + (inc.eps - 1)).template cast<C>() * (e * e.transpose()).array())
                   .matrix();
  }
  return out;
}

// Crack data model from the factorized singular-vector structure:
//   sound-soft  u_m = [exp(i omega th_n . x_m)]_n
//   sound-hard  u_m = [(th_n . n(x_m)) exp(i omega th_n . x_m)]_n
//   K = sum_m s_m u_m u_m^T
template <typename Scalar>
MsrMatrix<Scalar> msr_crack(const SceneGeometry<Scalar>& geom, CrackBoundary bc, Scalar omega,
                            const DirectionSet<Scalar>& dirs,
                            const std::vector<Scalar>& strengths = {}) {
  using C = std::complex<Scalar>;
  if (geom.empty()) throw std::invalid_argument("msr_crack: empty geometry");
  if (!(omega > Scalar(0))) throw std::invalid_argument("msr_crack: omega must be positive");
  if (!strengths.empty() && static_cast<Index>(strengths.size()) != geom.size())
    throw std::invalid_argument("msr_crack: strengths length must match point count");

  const Index n = dirs.size();
  MsrMatrix<Scalar> out;
  out.matrix = MatrixXC<Scalar>::Zero(n, n);
  out.model = bc == CrackBoundary::SoundSoft ? MsrModel::CrackSoft : MsrModel::CrackHard;
  out.omega = omega;
  out.source_points = geom.size();
  for (Index m = 0; m < geom.size(); ++m) {
    const Scalar s = strengths.empty() ? Scalar(1) : strengths[m];
    VectorXC<Scalar> u = detail::phase_vector(dirs, Vec2<Scalar>(geom.points.col(m)), omega);
    if (bc == CrackBoundary::SoundHard) {
      const VectorX<Scalar> an = dirs.vectors.transpose() * geom.normals.col(m);
      u = (an.template cast<C>().array() * u.array()).matrix();
    }
    out.matrix.noalias() += s * (u * u.transpose());
  }
  return out;
}

// K + level ||K||_F / N * G with complex standard Gaussian G, symmetrized as
// (X + X^T)/2; deterministic per seed.
template <typename Scalar>
MsrMatrix<Scalar> add_noise(const MsrMatrix<Scalar>& msr, Scalar level, std::uint64_t seed) {
  using C = std::complex<Scalar>;
  if (!(level >= Scalar(0))) throw std::invalid_argument("add_noise: level must be >= 0");
  if (level == Scalar(0)) return msr;

  const Index n = msr.size();
  const Scalar sigma = level * msr.matrix.norm() / Scalar(n);
  std::mt19937_64 rng(seed);
  MatrixXC<Scalar> g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      g(i, j) = C(static_cast<Scalar>(detail::gaussian(rng)),
                  static_cast<Scalar>(detail::gaussian(rng)));

  MsrMatrix<Scalar> out = msr;
  const MatrixXC<Scalar> perturbed = msr.matrix + sigma * g;
  out.matrix = (perturbed + perturbed.transpose()) / Scalar(2);
  return out;
}

}  // namespace music2d
