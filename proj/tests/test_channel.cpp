#include <doctest.h>

#include "lcris/channel.hpp"

using namespace lcris;
using namespace lcris::channel;

TEST_CASE("free-space amplitude gain") {
  // lambda / (4 pi d), frozen against an independent evaluation
  CHECK(path_gain(34.1, 0.005) == doctest::Approx(1.1668250959816373e-05).epsilon(1e-12));
  CHECK(path_gain(12.0, 0.005) == doctest::Approx(3.315727981081153e-05).epsilon(1e-12));
  CHECK_THROWS_AS(path_gain(0.0, 0.005), std::domain_error);
  CHECK_THROWS_AS(path_gain(1.0, -1.0), std::domain_error);
}

TEST_CASE("aperture correction factor") {
  ArraySpec spec;
  CHECK(eta(spec) == doctest::Approx(1.5952084658149643).epsilon(1e-12));
}

TEST_CASE("steering vector structure") {
  ArraySpec spec;
  spec.ny = 3;
  spec.nz = 2;
  const Eigen::VectorXcd a = steering_vector(spec, 0.3, -0.7);

  REQUIRE(a.size() == 6);
  CHECK(a[0] == std::complex<double>(1.0, 0.0));
  for (Eigen::Index n = 0; n < a.size(); ++n)
    CHECK(std::abs(a[n]) == doctest::Approx(1.0).epsilon(1e-12));

  // Kronecker layout: element n = k * ny + m factors into row and column
  // phase increments.
  const double psi_y = std::arg(a[1]);       // column step (m = 1)
  const double psi_z = std::arg(a[spec.ny]); // row step (k = 1)
  for (int k = 0; k < spec.nz; ++k)
    for (int m = 0; m < spec.ny; ++m) {
      const std::complex<double> want =
          std::polar(1.0, k * psi_z + m * psi_y);
      CHECK(std::abs(a[k * spec.ny + m] - want) < 1e-9);
    }
}

TEST_CASE("steering vector two-element oracle") {
  // Half-wavelength column spacing at broadside-plus-90-degrees gives
  // alternating signs: [1, -1].
  ArraySpec spec;
  spec.ny = 2;
  spec.nz = 1;
  spec.dy = spec.lambda / 2.0;
  const Eigen::VectorXcd a = steering_vector(spec, 0.0, kPi / 2.0);
  CHECK(std::abs(a[0] - std::complex<double>(1.0, 0.0)) < 1e-9);
  CHECK(std::abs(a[1] - std::complex<double>(-1.0, 0.0)) < 1e-9);
}

TEST_CASE("nlos sampler statistics") {
  Rng rng(42);
  const int n = 100000;
  const Eigen::VectorXcd z = sample_nlos(n, 2.0, rng);
  CHECK(z.squaredNorm() / n == doctest::Approx(2.0).epsilon(0.02));

  Rng r0(7);
  CHECK(sample_nlos(16, 0.0, r0).isZero());

  Rng a(5), b(5);
  CHECK(sample_nlos(8, 1.0, a) == sample_nlos(8, 1.0, b));
}

TEST_CASE("rician channel normalization") {
  ArraySpec spec;
  LinkGeometry geom;
  geom.distance = 12.0;
  geom.azimuth = 0.5;
  geom.tag = LinkTag::RisUser;
  const double g = path_gain(12.0, spec.lambda);

  Rng rng(11);
  // E|h_n|^2 = g^2 (K/(K+1) + sigma^2/(K+1)) = g^2 at sigma^2 = 1
  double acc = 0.0;
  const int draws = 200;
  for (int i = 0; i < draws; ++i) {
    const LinkChannel h = build_channel(geom, spec, 20.0, 1.0, rng);
    acc += h.h.squaredNorm() / spec.size();
  }
  CHECK(acc / draws == doctest::Approx(g * g).epsilon(0.02));

  // K -> infinity collapses onto the LoS ray
  Rng r2(3);
  const LinkChannel pure = build_channel(geom, spec, 1e12, 1.0, r2);
  const Eigen::VectorXcd los = g * steering_vector(spec, geom.elevation, geom.azimuth);
  CHECK((pure.h - los).norm() / los.norm() < 1e-4);
}

TEST_CASE("direct link is scalar pure NLoS") {
  ArraySpec spec;
  LinkGeometry geom;
  geom.distance = 20.0;
  geom.tag = LinkTag::ApUser;
  Rng rng(9);
  const LinkChannel h = build_channel(geom, spec, 50.0, 1.0, rng);
  REQUIRE(h.h.size() == 1);

  // Variance of the scalar equals g^2 regardless of the K argument.
  Rng r(1);
  double acc = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    acc += std::norm(build_channel(geom, spec, 50.0, 1.0, r).h[0]);
  const double g = path_gain(20.0, spec.lambda);
  CHECK(acc / draws == doctest::Approx(g * g).epsilon(0.03));
}

TEST_CASE("effective channel and snr") {
  ArraySpec spec;
  spec.ny = 2;
  spec.nz = 1;
  LinkChannel ar, ru;
  ar.h = Eigen::VectorXcd(2);
  ru.h = Eigen::VectorXcd(2);
  ar.h << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 1.0);
  ru.h << std::complex<double>(2.0, 0.0), std::complex<double>(1.0, 0.0);
  Eigen::VectorXd phases(2);
  phases << 0.0, -kPi / 2.0;  // rotates the j term back onto the real axis

  const std::complex<double> h_eff = effective_channel(ar, ru, phases, spec);
  CHECK(std::abs(h_eff - eta(spec) * std::complex<double>(3.0, 0.0)) < 1e-12);

  Eigen::VectorXd bad(3);
  CHECK_THROWS_AS(effective_channel(ar, ru, bad, spec), std::domain_error);

  CHECK(snr({1.0, 0.0}, {1.0, 0.0}, 1000.0, 1e-13) ==
        doctest::Approx(4.0e16).epsilon(1e-12));
}
