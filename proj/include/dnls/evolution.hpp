#ifndef DNLS_EVOLUTION_HPP
#define DNLS_EVOLUTION_HPP

#include <optional>
#include <vector>

#include "dnls/spectral.hpp"

namespace dnls {

enum class ModelKind { dnls, gauged, quintic };

struct ModelSpec {
    ModelKind kind = ModelKind::gauged;
    double lambda = 1.0;          // dnls coupling
    double a = 0.0, b = 0.0, c = 0.0;  // quintic couplings
};

struct SolverConfig {
    double dt = 1e-3;
    double T_final = 1.0;
    int sample_every = 1;
    double dealias_fraction = 2.0 / 3.0;
};

// Integrating-factor RK4 on the spectral coefficients. The linear propagator
// is exact per step; nonlinear products are formed on a 4x zero-padded grid,
// so cubic and quintic convolutions are alias-free for any retained band.
// The dealias mask is the Galerkin truncation to |k| <= fraction * K/2.
class Stepper {
  public:
    Stepper(const Grid& g, const ModelSpec& model, double dealias_fraction);

    // nonlinear part N(u) of du/dt, projected to the retained band
    std::vector<cplx> nonlinear(const std::vector<cplx>& coeffs) const;
    // full right side, linear + nonlinear, in solved-for form
    std::vector<cplx> rhs_coeffs(const std::vector<cplx>& coeffs) const;
    std::vector<cplx> step_coeffs(const std::vector<cplx>& coeffs, double dt) const;

    const Grid& grid() const { return g_; }
    int band() const { return band_; }  // retained |k| <= band

  private:
    Grid g_;
    ModelSpec model_;
    int band_;
    Grid gp_;  // padded
    double lin_sign_;  // propagator exp(lin_sign * i xi^2 dt)
};

Field rhs(const ModelSpec& model, const Field& f, double dealias_fraction = 2.0 / 3.0);
Field step(const ModelSpec& model, const Field& f, double dt,
           double dealias_fraction = 2.0 / 3.0);

struct TrajectoryDiag {
    double mass = 0.0;
    double E = 0.0;
    double E1 = 0.0;  // only when I-params supplied
    double max_abs = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> snapshots;
    std::vector<TrajectoryDiag> diag;
};

// Throws NonFinite (with the failing time) on blow-up or instability.
// Warns when a gauged run violates the smallness condition ||f0||_2 < sqrt(2 pi).
Trajectory evolve(const ModelSpec& model, const SolverConfig& cfg, const Field& f0,
                  const std::optional<ISymbolParams>& ip = {});

// dt heuristic for the transported derivative nonlinearity
double dt_budget(const Field& f, double dealias_fraction = 2.0 / 3.0);

// initial-data library; all recipes rescale to a target L2 norm
Field gaussian_data(const Grid& g, double center, double width, double target_l2);
Field sech_data(const Grid& g, double center, double width, double phase_speed,
                double target_l2);
// chat(xi) = <xi>^{-s-1/2} * standard complex gaussian on |k| <= cutoff_mode
Field rough_data(const Grid& g, double s, std::uint64_t seed, double target_l2,
                 int cutoff_mode);

// coefficients copied into a wider band (same L); inverse of restrict_to_grid
Field embed_field(const Field& f, const Grid& big);
Field restrict_field(const Field& f, const Grid& small);

// largest |k| with a nonzero coefficient (0 for the zero field)
int support_band(const Field& f);

}  // namespace dnls

#endif
