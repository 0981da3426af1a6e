#pragma once

#include <string>
#include <vector>

namespace surfint {

struct OracleResult {
  std::vector<double> eigenvalues;   // ascending, all below zero
  std::string method;
  double step = 0.0;                 // finest grid step used
  double extent = 0.0;               // half-length (1D) or outer radius (radial)
};

struct OracleOptions {
  double step = 0.0;          // 0 picks a step from the decay rate
  double decay_lengths = 20;  // domain reaches this many decay lengths past the interface
  bool extrapolate = true;    // Richardson over steps h and h/2
};

// Bound state of -u'' - alpha delta_0 on the line; empty for alpha <= 0.
OracleResult point_delta_1d(double alpha, const OracleOptions& opts = {});
// Bound state of the 1D delta' interaction, u(0-) - u(0+) = beta u'(0); empty for beta <= 0.
OracleResult point_deltaprime_1d(double beta, const OracleOptions& opts = {});

inline double delta_1d_closed_form(double alpha) { return -alpha * alpha / 4.0; }
inline double deltaprime_1d_closed_form(double beta) { return -4.0 / (beta * beta); }

// Negative eigenvalues of the circle problem split by angular mode m = 0..m_max.
// Modes m >= 1 occur twice in the planar spectrum.
struct RadialSpectrum {
  std::vector<OracleResult> modes;
  // All negative eigenvalues with multiplicity, ascending.
  std::vector<double> with_multiplicity() const;
};

RadialSpectrum circle_delta_radial(double R, double alpha, int m_max, const OracleOptions& opts = {});
RadialSpectrum circle_deltaprime_radial(double R, double beta, int m_max, const OracleOptions& opts = {});

// Same spectra from the modified Bessel matching conditions.
RadialSpectrum circle_delta_bessel(double R, double alpha, int m_max);
RadialSpectrum circle_deltaprime_bessel(double R, double beta, int m_max);

}  // namespace surfint
