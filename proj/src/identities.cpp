#include <cmath>
#include <complex>
#include <cstdlib>
#include <random>

#include "music2d/scene.hpp"
#include "music2d/special.hpp"

namespace music2d {

namespace {

double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vec2d disk_point(std::mt19937_64& rng) {
  while (true) {
    const Vec2d p(2 * canonical(rng) - 1, 2 * canonical(rng) - 1);
    if (p.squaredNorm() <= 1.0) return p;
  }
}

Vec2d unit_vector(std::mt19937_64& rng) {
  const double angle = 2 * std::numbers::pi * canonical(rng);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

IdentityReport run_identities() {
  IdentityReport report;

  // circular averages vs J0 / J1 at N = 128, omega = 5 pi
  {
    const double omega = 5 * std::numbers::pi;
    const auto dirs = sample_directions(128);
    std::mt19937_64 rng(0x1d3a5ull);
    for (int trial = 0; trial < 100; ++trial) {
      const Vec2d x = disk_point(rng);
      const Vec2d xi = unit_vector(rng);
      const double r = x.norm();
      const auto m0 = circular_moment0(x, omega, dirs);
      report.moment0_max =
          std::max(report.moment0_max, std::abs(m0 - std::complex<double>(bessel_j0(omega * r), 0)));
      const auto m1 = circular_moment1(x, xi, omega, dirs);
      const double radial = r > 0 ? x.dot(xi) / r : 0.0;
      const std::complex<double> expected(0, radial * bessel_j1(omega * r));
      report.moment1_max = std::max(report.moment1_max, std::abs(m1 - expected));
    }
  }

  // Gram structure of the model vectors on a line sampled at half-wavelength
  {
    const double lambda = 0.4;
    const double omega = 2 * std::numbers::pi / lambda;
    const auto dirs = sample_directions(128);
    const auto geom =
        discretize_curve(CurveSpec<double>::line({-0.6, 0.13}, {0.6, 0.13}), lambda / 2);
    const Index m_count = geom.size();

    std::vector<VectorXC<double>> g(m_count);
    for (Index m = 0; m < m_count; ++m)
      g[m] = steering_raw(Vec2d(geom.points.col(m)), omega, dirs) / std::sqrt(128.0);

    for (Index m = 0; m < m_count; ++m) {
      for (Index mp = 0; mp < m_count; ++mp) {
        const std::complex<double> inner = g[mp].dot(g[m]);  // sum g_m conj(g_mp)
        const double dist = (geom.points.col(m) - geom.points.col(mp)).norm();
        const double dev = std::abs(inner - std::complex<double>(bessel_j0(omega * dist), 0));
        report.gram_j0_max = std::max(report.gram_j0_max, dev);
        if (std::abs(m - mp) == 1)
          report.gram_adjacent_mag = std::max(report.gram_adjacent_mag, std::abs(inner));
      }
    }

    // frame-weighted form: (1/N) sum (th . (xs + xs'')) exp(i w th . (x_m - x_mp))
    for (Index m = 0; m < m_count; ++m) {
      for (Index mp = 0; mp < m_count; ++mp) {
        for (int s = 0; s < 2; ++s) {
          for (int sp = 0; sp < 2; ++sp) {
            if (m == mp && s == sp) continue;
            const Vec2d xs = s == 0 ? Vec2d(geom.tangents.col(m)) : Vec2d(geom.normals.col(m));
            const Vec2d xsp =
                sp == 0 ? Vec2d(geom.tangents.col(mp)) : Vec2d(geom.normals.col(mp));
            const Vec2d d = geom.points.col(m) - geom.points.col(mp);
            std::complex<double> sum(0, 0);
            for (Index n = 0; n < dirs.size(); ++n) {
              const double weight = dirs.vectors.col(n).dot(xs + xsp);
              const double phase = omega * dirs.vectors.col(n).dot(d);
              sum += weight * std::complex<double>(std::cos(phase), std::sin(phase));
            }
            sum /= double(dirs.size());
            const double dist = d.norm();
            std::complex<double> expected(0, 0);
            if (dist > 0)
              expected = std::complex<double>(
                  0, (d / dist).dot(xs + xsp) * bessel_j1(omega * dist));
            report.gram_j1_max = std::max(report.gram_j1_max, std::abs(sum - expected));
          }
        }
      }
    }
  }

  // MUSIC vs migration relation on the permittivity-contrast scene
  {
    SceneConfig config = preset_scene("gamma1-eps");
    config.nx = 64;
    config.ny = 64;
    const double omega = config.omega();
    const auto dirs = sample_directions(config.directions);
    const auto geom = discretize_curve(*config.curve, config.effective_spacing());
    const auto msr = msr_thin(geom, {config.eps, config.mu, config.h}, omega, dirs);
    auto dec = svd(msr);
    dec.signal_dim = estimate_signal_dim(dec.sigma, config.tau);
    const auto grid = config.grid();
    const auto music = music_map(dec, omega, dirs, grid, config.cap);
    const auto migration = migration_map(dec, omega, dirs, grid);
    const double n = double(config.directions);
    for (Index iy = 0; iy < grid.ny(); ++iy) {
      for (Index ix = 0; ix < grid.nx(); ++ix) {
        const double e = music(ix, iy);
        if (e >= config.cap) continue;
        const double identity = 1.0 / (e * e * n) + migration(ix, iy) - 1.0;
        report.migration_identity_max =
            std::max(report.migration_identity_max, std::abs(identity));
      }
    }
  }

  return report;
}

}  // namespace music2d
