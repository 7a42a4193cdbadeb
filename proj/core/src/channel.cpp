#include "lcris/channel.hpp"

namespace lcris::channel {

namespace {
constexpr double kMaxKFactor = 1e9;
}

void LinkGeometry::validate() const {
  if (!(distance > 0.0)) throw ConfigError("link distance must be > 0");
  if (elevation < -kPi / 2 || elevation > kPi / 2)
    throw ConfigError("elevation out of [-pi/2, pi/2]");
  if (azimuth <= -kPi || azimuth > kPi) throw ConfigError("azimuth out of (-pi, pi]");
}

void ArraySpec::validate() const {
  if (ny <= 0 || nz <= 0) throw ConfigError("array dimensions must be positive");
  if (!(dy > 0.0) || !(dz > 0.0)) throw ConfigError("element spacing must be > 0");
  if (!(lambda > 0.0)) throw ConfigError("wavelength must be > 0");
}

double path_gain(double distance, double lambda) {
  if (!(distance > 0.0)) throw std::domain_error("path_gain: distance must be > 0");
  if (!(lambda > 0.0)) throw std::domain_error("path_gain: wavelength must be > 0");
  return lambda / (4.0 * kPi * distance);
}

Eigen::VectorXcd steering_vector(const ArraySpec& spec, double theta, double phi) {
  spec.validate();
  const double kappa = spec.wave_number();
  const std::complex<double> j(0.0, 1.0);

  Eigen::VectorXcd az(spec.nz);
  for (int k = 0; k < spec.nz; ++k)
    az[k] = std::exp(j * (kappa * spec.dz * k * std::sin(theta)));
  Eigen::VectorXcd ay(spec.ny);
  for (int m = 0; m < spec.ny; ++m)
    ay[m] = std::exp(j * (kappa * spec.dy * m * std::sin(phi) * std::cos(theta)));

  // Kronecker product az (x) ay: element n = k * ny + m.
  Eigen::VectorXcd a(spec.size());
  for (int k = 0; k < spec.nz; ++k)
    for (int m = 0; m < spec.ny; ++m) a[k * spec.ny + m] = az[k] * ay[m];
  return a;
}

Eigen::VectorXcd sample_nlos(int length, double variance, Rng& rng) {
  if (variance < 0.0) throw std::domain_error("sample_nlos: negative variance");
  Eigen::VectorXcd v(length);
  if (variance == 0.0) {
    v.setZero();
    return v;
  }
  std::normal_distribution<double> dist(0.0, std::sqrt(variance / 2.0));
  for (int i = 0; i < length; ++i) {
    const double re = dist(rng);
    const double im = dist(rng);
    v[i] = {re, im};
  }
  return v;
}

LinkChannel build_channel(const LinkGeometry& geom, const ArraySpec& spec,
                          double k_factor, double sigma2_nlos, Rng& rng) {
  geom.validate();
  if (k_factor < 0.0) throw std::domain_error("build_channel: K < 0");
  const double k = std::min(k_factor, kMaxKFactor);
  const double g = path_gain(geom.distance, spec.lambda);

  LinkChannel out;
  out.gain = g;
  if (geom.tag == LinkTag::ApUser) {
    // Blocked LoS: scalar pure-NLoS channel.
    out.k_factor = 0.0;
    out.h = g * sample_nlos(1, sigma2_nlos, rng);
    return out;
  }
  out.k_factor = k;
  const Eigen::VectorXcd los = steering_vector(spec, geom.elevation, geom.azimuth);
  const Eigen::VectorXcd nlos = sample_nlos(spec.size(), sigma2_nlos, rng);
  out.h = g * (std::sqrt(k / (k + 1.0)) * los + std::sqrt(1.0 / (k + 1.0)) * nlos);
  return out;
}

double eta(const ArraySpec& spec) {
  return std::sqrt(4.0 * kPi * spec.dy * spec.dz) / spec.lambda;
}

std::complex<double> effective_channel(const LinkChannel& h_ar,
                                       const LinkChannel& h_ru,
                                       const Eigen::VectorXd& phases,
                                       const ArraySpec& spec) {
  const auto n = h_ar.h.size();
  if (h_ru.h.size() != n || phases.size() != n)
    throw std::domain_error("effective_channel: vector length mismatch");
  const std::complex<double> j(0.0, 1.0);
  std::complex<double> acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    acc += h_ru.h[i] * std::exp(j * phases[i]) * h_ar.h[i];
  return eta(spec) * acc;
}

double snr(std::complex<double> h_au, std::complex<double> h_eff,
           double pt_watts, double noise_watts) {
  if (!(pt_watts > 0.0)) throw std::domain_error("snr: Pt must be > 0");
  if (!(noise_watts > 0.0)) throw std::domain_error("snr: noise power must be > 0");
  return pt_watts * std::norm(h_au + h_eff) / noise_watts;
}

}  // namespace lcris::channel
