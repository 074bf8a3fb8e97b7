#ifndef DNLS_ENERGIES_HPP
#define DNLS_ENERGIES_HPP

#include <array>
#include <optional>

#include "dnls/multilinear.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

double mass(const Field& f);  // ||f||_2^2

// E(f) = int |dx f|^2 - (1/2) Im int f fbar f dx fbar, spectral derivative and
// oversampled physical quadrature (exact for band-limited fields)
double energy_physical(const Field& f);

// E(f) = -Lambda_2(xi1 xi2) + (1/8) Lambda_4(xi_{13-24})
double energy_spectral(const Field& f, const LambdaOptions& opt = {});

// g(xi) = m^2(xi) xi^2 and its derivatives; the kink at |xi| = N uses the
// inner (m = 1) branch
double g_m2xi2(const ISymbolParams& p, double xi);
double g_m2xi2_d1(const ISymbolParams& p, double xi);
double g_m2xi2_d2(const ISymbolParams& p, double xi);

double sigma4(const ISymbolParams& p, const double xi[4]);
double sigma6(const ISymbolParams& p, const double xi[6]);

// M4 = -sigma4 / (2 xi_{12} xi_{14}), extended to the whole lattice
// hyperplane by directional limits on the resonant set:
//   xi_{12} = 0 xor xi_{14} = 0:
//       -[g'(x1) x3 - g'(x3) x1 + g(x3) - g(x1)] / (2 (x1 - x3))
//   xi_{12} = xi_{14} = 0 (tuple (x,-x,x,-x)):
//       g'(x) - (x/2) g''(x).
// An optional lattice table of g speeds up the generic branch.
class M4Evaluator {
  public:
    explicit M4Evaluator(const ISymbolParams& p);
    M4Evaluator(const ISymbolParams& p, double dxi, int max_mode);  // with table
    double operator()(double x1, double x2, double x3, double x4) const;
    const ISymbolParams& params() const { return p_; }

  private:
    double g(double xi) const;
    ISymbolParams p_;
    double dxi_ = 0.0;
    int tmax_ = -1;
    std::vector<double> table_;
};

// Symmetrized multipliers of the increment identity (Prop-3.7 forms).
// band_limit, when set, multiplies every elongated-M4 term by the indicator
// that its grouped argument stays within |xi| <= band_limit; this is the
// exact counterpart of evolving on a Galerkin-truncated band (the default,
// unset, is the free/paper form).
cplx m6_value(const M4Evaluator& m4, const double xi[6],
              std::optional<double> band_limit = {});
cplx m8_value(const M4Evaluator& m4, const double xi[8], double C2,
              std::optional<double> band_limit = {});

// Functional-equivalent multipliers for Lambda_n(.; f) on self-tuples:
// by odd/even slot permutation invariance the 36/576-term symmetrized sums
// reduce to single-permutation forms (4 M4 evaluations per tuple).
MultiplierN m6_functional(const M4Evaluator& m4, std::optional<double> band_limit = {});
MultiplierN m8_functional(const M4Evaluator& m4, double C2,
                          std::optional<double> band_limit = {});
// m8_functional with C2 = 1, used as the regressor when calibrating C2
MultiplierN m8_basis_functional(const M4Evaluator& m4, std::optional<double> band_limit = {});

double modified_energy_1(const Field& f, const ISymbolParams& p);  // E(I f)
// E2 = -Lambda_2(m1 xi1 m2 xi2) + (1/2) Lambda_4(M4)
double modified_energy_2(const Field& f, const ISymbolParams& p,
                         double* imag_residual = nullptr, const LambdaOptions& opt = {});

struct EnergySnapshot {
    double mass = 0.0;
    double E = 0.0;
    double E1 = 0.0;
    double E2 = 0.0;
    double imag_residual = 0.0;
};
EnergySnapshot energy_snapshot(const Field& f, const ISymbolParams& p,
                               const LambdaOptions& opt = {});

struct FreqOrdering {
    std::array<int, 4> idx;   // soprano, alto, tenor, baritone (0-based slots)
    std::array<double, 4> N;  // matching magnitudes, nonincreasing
};
FreqOrdering freq_ordering(const double* xi, int n);

// Centered 5-point dt-derivative of E2 along the gauged flow through f.
// f is embedded into an ambient grid wide enough that the cubic and quintic
// convolutions of its support band are unprojected, so the derivative is the
// one of the untruncated dynamics at f.
double ddt_e2_via_ministeps(const Field& f, const ISymbolParams& p, double dt,
                            const LambdaOptions& opt = {});

// least-squares C2 from the exact increment identity: for random
// band-limited fields, FD-in-time of E2 across one high-accuracy solver step
// equals Lambda_6(M6) + C2 * Lambda_8(basis). Throws CalibrationFailed when
// the post-fit residual is above the FD-error budget.
struct C2Calibration {
    double C2 = 0.0;
    double residual_rel = 0.0;  // ||y - C2 x|| / ||y||
    double dt = 0.0;
    int fields = 0;
};
C2Calibration calibrate_c2(int K_small, const ISymbolParams& p, std::uint64_t seed,
                           int fields = 10, double dt = 1e-4,
                           double residual_tol = 1e-6);

struct DiagnosticsRecord {
    double gn_ratio = 0.0;        // ||dx f||^2 / E(f)
    double e2_strength = 0.0;     // ||dx I f||^2 / E2(f)
    double e2 = 0.0;
    double energy = 0.0;
};
// requires ||f||_2 < sqrt(2 pi), else throws SmallnessViolated
DiagnosticsRecord diagnostics(const Field& f, const ISymbolParams& p,
                              const LambdaOptions& opt = {});

// Empirical sup constants of the multiplier bounds over random lattice
// Gamma-tuples, one regime per field. Reported, never asserted against a
// universal constant; stability under N doubling is the test.
struct MultiplierSweep {
    double m4_general = 0.0;    // |M4| / (m^2(Nsop) Nsop)
    double m4_regime42 = 0.0;   // |M4| / (m^2(Nsop) Ntenor),   |x1|~|x3| >~ N >> |x2|,|x4|
    double r_regime43 = 0.0;    // |M4 - m1^2 x2^2/(2 x1)| / Ntenor, |x1|~|x2| >~ N >> rest
    double m6_high_tenor = 0.0; // |M6| / (m^2(Nsop) Nsop^2),   Ntenor >~ N
    double m6_low_tenor = 0.0;  // |M6| / (Nsop Ntenor),        Ntenor << N
    double m8_general = 0.0;    // |M8| / (m^2(Nsop) Nsop)
};
MultiplierSweep sweep_multiplier_bounds(const ISymbolParams& p, std::int64_t tuples_per_regime,
                                        std::uint64_t seed, int lattice_range, double C2);

}  // namespace dnls

#endif
