#include "dnls/gauge.hpp"

#include <cmath>
#include <cstdio>

namespace dnls {

std::vector<double> antiderivative_density(const Field& f) {
    // Exact antiderivative of the band-limited density: |f|^2 has twice the
    // band of f, so it is sampled and transformed on a doubled grid before
    // the spectral integration. F(right edge limit) equals ||f||_2^2.
    const Grid& g = f.grid;
    Grid g2{g.L, 2 * g.K};

    std::vector<cplx> cpad(g2.K, cplx{0.0, 0.0});
    for (int k = g.kmin(); k <= g.kmax(); ++k) cpad[g2.index(k)] = f.c(k);
    std::vector<cplx> fine = to_physical(g2, cpad);
    std::vector<cplx> dens(g2.K);
    for (int j = 0; j < g2.K; ++j) dens[j] = std::norm(fine[j]);
    std::vector<cplx> dhat = to_spectral(g2, dens);

    // F(x) = (1/L) [ dhat_0 (x - x0) + sum_{k!=0} dhat_k/(i xi_k) (e^{i xi x} - e^{i xi x0}) ]
    std::vector<cplx> anti(g2.K, cplx{0.0, 0.0});
    for (int k = g2.kmin(); k <= g2.kmax(); ++k) {
        if (k == 0 || k == g2.kmin()) continue;
        anti[g2.index(k)] = dhat[g2.index(k)] / cplx{0.0, g2.xi(k)};
    }
    std::vector<cplx> osc = to_physical(g2, anti);

    const double mean = dhat[g2.index(0)].real() / g.L;
    const double x0 = -g.L / 2.0;
    const cplx osc0 = osc[0];
    std::vector<double> F(g.K);
    for (int j = 0; j < g.K; ++j)
        F[j] = mean * (g.x(j) - x0) + (osc[2 * j] - osc0).real();  // K-grid point j = fine point 2j
    return F;
}

GaugeReport gauge_report(const Field& f) {
    const Grid& g = f.grid;
    GaugeReport r;
    int edge = std::max(1, g.K / 20);
    for (int j = 0; j < g.K; ++j) {
        if (j < edge || j >= g.K - edge)
            r.boundary_tail = std::max(r.boundary_tail, std::abs(f.values[j]));
    }
    double mass = 0.0;
    for (const auto& v : f.values) mass += std::norm(v);
    r.wraparound_phase_jump = mass * g.dx();
    return r;
}

Field gauge_apply(const Field& f, GaugeDirection dir, GaugeReport* report,
                  double tail_threshold) {
    GaugeReport r = gauge_report(f);
    double scale = f.max_abs();
    if (scale > 0.0 && r.boundary_tail > tail_threshold * scale)
        std::fprintf(stderr,
                     "warning: TailTooLarge: boundary_tail=%g exceeds %g*max|f|; "
                     "the torus gauge surrogate is inaccurate for this data\n",
                     r.boundary_tail, tail_threshold);
    if (report) *report = r;

    std::vector<double> F = antiderivative_density(f);
    const double sgn = (dir == GaugeDirection::forward) ? -1.0 : 1.0;
    Field out;
    out.grid = f.grid;
    out.values.resize(f.grid.K);
    for (int j = 0; j < f.grid.K; ++j)
        out.values[j] = std::polar(1.0, sgn * F[j]) * f.values[j];
    // keep the exact pointwise product as the physical state; the spectral
    // side drops the unpaired mode as every ingestion does
    out.coeffs = to_spectral(f.grid, out.values);
    out.coeffs[f.grid.index(f.grid.kmin())] = 0.0;
    return out;
}

}  // namespace dnls
