#pragma once

#include <Eigen/Dense>
#include <complex>

#include "lcris/common.hpp"

namespace lcris::channel {

enum class LinkTag { ApUser, ApRis, RisUser };

// Distance and angles of one link, angles seen from the RIS local frame.
struct LinkGeometry {
  double distance = 1.0;   // m, > 0
  double elevation = 0.0;  // rad, [-pi/2, pi/2]
  double azimuth = 0.0;    // rad, (-pi, pi]
  LinkTag tag = LinkTag::ApUser;

  void validate() const;
};

// Uniform planar array: ny columns (azimuth direction), nz rows (elevation).
struct ArraySpec {
  int ny = 30;            // columns
  int nz = 25;            // rows per column
  double dy = 0.00225;    // m, 0.45 * lambda at 60 GHz
  double dz = 0.00225;    // m
  double lambda = 0.005;  // m

  int size() const { return ny * nz; }
  double wave_number() const { return kTwoPi / lambda; }
  void validate() const;
};

// Channel coefficients of one link in one time slot.
struct LinkChannel {
  Eigen::VectorXcd h;      // length 1 (A-U) or N (A-R, R-U)
  double gain = 0.0;       // large-scale amplitude factor
  double k_factor = 0.0;   // Rician K
};

// Free-space amplitude gain lambda / (4 pi d).
double path_gain(double distance, double lambda);

// a_z kron a_y; unit-modulus entries, first entry exactly 1.
Eigen::VectorXcd steering_vector(const ArraySpec& spec, double theta, double phi);

// i.i.d. circularly symmetric complex Gaussian vector, per-entry variance.
Eigen::VectorXcd sample_nlos(int length, double variance, Rng& rng);

// Rician channel. A-U links are scalar and pure NLoS (blocked LoS).
LinkChannel build_channel(const LinkGeometry& geom, const ArraySpec& spec,
                          double k_factor, double sigma2_nlos, Rng& rng);

// Aperture correction factor sqrt(4 pi dy dz) / lambda.
double eta(const ArraySpec& spec);

// eta * sum_n h_ru[n] e^{j w_n} h_ar[n]. `phases` has one entry per element.
std::complex<double> effective_channel(const LinkChannel& h_ar,
                                       const LinkChannel& h_ru,
                                       const Eigen::VectorXd& phases,
                                       const ArraySpec& spec);

// Pt |h_au + h_eff|^2 / sigma2, linear.
double snr(std::complex<double> h_au, std::complex<double> h_eff,
           double pt_watts, double noise_watts);

}  // namespace lcris::channel
