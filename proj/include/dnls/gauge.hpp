#ifndef DNLS_GAUGE_HPP
#define DNLS_GAUGE_HPP

#include "dnls/spectral.hpp"

namespace dnls {

// Torus surrogate diagnostics for the line-based gauge map: the integral
// \int_{-inf}^{x} becomes \int_{-L/2}^{x}, which is honest only when the data
// is negligible near the domain edges. Both numbers ship with every
// application so experiments can check their grids.
struct GaugeReport {
    double boundary_tail = 0.0;          // sup |f| over the outermost 5% of x
    double wraparound_phase_jump = 0.0;  // ||f||_2^2, the phase jump across the seam (radians)
};

enum class GaugeDirection { forward, inverse };

// F(x_j) = int_{-L/2}^{x_j} |f|^2 dy, evaluated through the spectral
// antiderivative of the band-limited density (exact for the discrete field).
// F(left) = 0, F nondecreasing, F(right edge) -> ||f||_2^2.
std::vector<double> antiderivative_density(const Field& f);

// forward: e^{-iF} f,  inverse: e^{+iF} f. Pointwise modulus and the L2 norm
// are preserved exactly. Emits a TailTooLarge warning (stderr, and via the
// report) when boundary_tail exceeds tail_threshold * max|f|.
Field gauge_apply(const Field& f, GaugeDirection dir, GaugeReport* report = nullptr,
                  double tail_threshold = 1e-8);

GaugeReport gauge_report(const Field& f);

}  // namespace dnls

#endif
