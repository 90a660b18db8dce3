#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "music2d/core.hpp"
#include "music2d/geometry.hpp"

namespace music2d {

namespace detail {

// Ascending power series for J0 and J1. Long-double accumulation keeps the
// alternating-sum cancellation near the |x| < 12 switch point below 1e-15.
inline std::pair<long double, long double> bessel_j01_series(long double x) {
  const long double q = x * x / 4.0L;
  long double t0 = 1.0L, s0 = 1.0L;
  long double t1 = 1.0L, s1 = 1.0L;
  for (int k = 1; k < 80; ++k) {
    t0 *= -q / (static_cast<long double>(k) * k);
    t1 *= -q / (static_cast<long double>(k) * (k + 1));
    s0 += t0;
    s1 += t1;
    if (std::abs(t0) < 1e-24L * std::abs(s0) && std::abs(t1) < 1e-24L * std::abs(s1)) break;
  }
  return {s0, x / 2.0L * s1};
}

// Miller backward recurrence, normalized by J0(x) + 2 sum_k J_{2k}(x) = 1.
inline std::pair<long double, long double> bessel_j01_miller(long double x) {
  int start = static_cast<int>(x + 20.0L * std::cbrt(static_cast<double>(x)) + 32.0L);
  if (start % 2) ++start;
  long double jnext = 0.0L;     // J_{n+1}
  long double jcur = 1e-30L;    // J_n, arbitrary seed
  long double j0 = 0.0L, j1 = 0.0L;
  long double norm = 2.0L * jcur;  // start index is even
  for (int n = start; n >= 1; --n) {
    const long double jprev = (2.0L * n / x) * jcur - jnext;
    jnext = jcur;
    jcur = jprev;  // now J_{n-1}
    const int idx = n - 1;
    if (idx == 0) {
      j0 = jcur;
    } else if (idx == 1) {
      j1 = jcur;
    } else if (idx % 2 == 0) {
      norm += 2.0L * jcur;
    }
    if (std::abs(jcur) > 1e260L) {
      jcur *= 1e-260L;
      jnext *= 1e-260L;
      norm *= 1e-260L;
      j0 *= 1e-260L;
      j1 *= 1e-260L;
    }
  }
  norm += j0;
  return {j0 / norm, j1 / norm};
}

inline std::pair<long double, long double> bessel_j01(long double x) {
  return x < 12.0L ? bessel_j01_series(x) : bessel_j01_miller(x);
}

}  // namespace detail

template <typename Scalar>
Scalar bessel_j0(Scalar x) {
  if (!std::isfinite(x)) throw std::invalid_argument("bessel_j0: non-finite argument");
  return static_cast<Scalar>(detail::bessel_j01(std::abs(static_cast<long double>(x))).first);
}

template <typename Scalar>
Scalar bessel_j1(Scalar x) {
  if (!std::isfinite(x)) throw std::invalid_argument("bessel_j1: non-finite argument");
  const long double ax = std::abs(static_cast<long double>(x));
  const long double j1 = detail::bessel_j01(ax).second;
  return static_cast<Scalar>(x < Scalar(0) ? -j1 : j1);  // J1 is odd
}

template <typename Scalar>
Scalar bessel_j(int order, Scalar x) {
  switch (order) {
    case 0:
      return bessel_j0(x);
    case 1:
      return bessel_j1(x);
    default:
      throw std::invalid_argument("bessel_j: only orders 0 and 1 are supported");
  }
}

// (1/N) sum_n exp(i omega theta_n . x); tends to J0(omega |x|) for large N.
template <typename Scalar>
std::complex<Scalar> circular_moment0(const Vec2<Scalar>& x, Scalar omega,
                                      const DirectionSet<Scalar>& dirs) {
  std::complex<Scalar> acc(0, 0);
  for (Index n = 0; n < dirs.size(); ++n) {
    const Scalar phase = omega * dirs.vectors.col(n).dot(x);
    acc += std::complex<Scalar>(std::cos(phase), std::sin(phase));
  }
  return acc / Scalar(dirs.size());
}

// (1/N) sum_n (theta_n . xi) exp(i omega theta_n . x) for unit xi; tends to
// i (x/|x| . xi) J1(omega |x|) for large N.
template <typename Scalar>
std::complex<Scalar> circular_moment1(const Vec2<Scalar>& x, const Vec2<Scalar>& xi,
                                      Scalar omega, const DirectionSet<Scalar>& dirs) {
  if (std::abs(xi.norm() - Scalar(1)) > Scalar(1e-10))
    throw std::invalid_argument("circular_moment1: xi must be a unit vector");
  std::complex<Scalar> acc(0, 0);
  for (Index n = 0; n < dirs.size(); ++n) {
    const Scalar weight = dirs.vectors.col(n).dot(xi);
    const Scalar phase = omega * dirs.vectors.col(n).dot(x);
    acc += weight * std::complex<Scalar>(std::cos(phase), std::sin(phase));
  }
  return acc / Scalar(dirs.size());
}

}  // namespace music2d
