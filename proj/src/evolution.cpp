#include "dnls/evolution.hpp"

#include <cmath>
#include <cstdio>

#include "dnls/energies.hpp"

namespace dnls {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

bool all_finite(const std::vector<cplx>& v) {
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}
}  // namespace

Stepper::Stepper(const Grid& g, const ModelSpec& model, double dealias_fraction)
    : g_(g), model_(model) {
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
        throw std::invalid_argument("Stepper: dealias_fraction must be in (0,1]");
    band_ = std::min(g.K / 2 - 1, static_cast<int>(dealias_fraction * (g.K / 2)));
    gp_ = Grid{g.L, 4 * g.K};
    lin_sign_ = (model.kind == ModelKind::quintic) ? 1.0 : -1.0;
}

std::vector<cplx> Stepper::nonlinear(const std::vector<cplx>& coeffs) const {
    // physical samples of u and dx u on the padded grid
    std::vector<cplx> cpad(gp_.K, cplx{0.0, 0.0}), dpad(gp_.K, cplx{0.0, 0.0});
    for (int k = -band_; k <= band_; ++k) {
        cplx c = coeffs[g_.index(k)];
        cpad[gp_.index(k)] = c;
        dpad[gp_.index(k)] = cplx{0.0, g_.xi(k)} * c;
    }
    std::vector<cplx> u = to_physical(gp_, cpad);
    std::vector<cplx> du = to_physical(gp_, dpad);

    std::vector<cplx> q(gp_.K);
    switch (model_.kind) {
        case ModelKind::gauged:
            // -w^2 dx(wbar) + (i/2) |w|^4 w
            for (int j = 0; j < gp_.K; ++j) {
                double a2 = std::norm(u[j]);
                q[j] = -u[j] * u[j] * std::conj(du[j]) + cplx{0.0, 0.5} * a2 * a2 * u[j];
            }
            break;
        case ModelKind::dnls:
            // lambda dx(|u|^2 u): product first, derivative in spectral space
            for (int j = 0; j < gp_.K; ++j) q[j] = std::norm(u[j]) * u[j];
            break;
        case ModelKind::quintic:
            // a |u|^2 dx u + b u^2 dx(ubar) - i c u^3 ubar^2
            for (int j = 0; j < gp_.K; ++j) {
                cplx ub = std::conj(u[j]);
                q[j] = model_.a * std::norm(u[j]) * du[j] +
                       model_.b * u[j] * u[j] * std::conj(du[j]) -
                       cplx{0.0, model_.c} * u[j] * u[j] * u[j] * ub * ub;
            }
            break;
    }
    std::vector<cplx> qc = to_spectral(gp_, q);
    std::vector<cplx> out(g_.K, cplx{0.0, 0.0});
    for (int k = -band_; k <= band_; ++k) {
        cplx v = qc[gp_.index(k)];
        if (model_.kind == ModelKind::dnls) v *= cplx{0.0, model_.lambda * g_.xi(k)};
        out[g_.index(k)] = v;
    }
    return out;
}

std::vector<cplx> Stepper::rhs_coeffs(const std::vector<cplx>& coeffs) const {
    std::vector<cplx> out = nonlinear(coeffs);
    for (int k = -band_; k <= band_; ++k) {
        double xi = g_.xi(k);
        out[g_.index(k)] += cplx{0.0, lin_sign_} * xi * xi * coeffs[g_.index(k)];
    }
    return out;
}

std::vector<cplx> Stepper::step_coeffs(const std::vector<cplx>& coeffs, double dt) const {
    const int K = g_.K;
    std::vector<cplx> e1(K), e2(K);
    for (int i = 0; i < K; ++i) {
        double xi = g_.xi(g_.mode(i));
        cplx ph = std::polar(1.0, lin_sign_ * xi * xi * dt / 2.0);
        e1[i] = ph;
        e2[i] = ph * ph;
    }
    std::vector<cplx> masked(K, cplx{0.0, 0.0});
    for (int k = -band_; k <= band_; ++k) masked[g_.index(k)] = coeffs[g_.index(k)];

    std::vector<cplx> k1 = nonlinear(masked);
    std::vector<cplx> tmp(K);
    for (int i = 0; i < K; ++i) tmp[i] = e1[i] * (masked[i] + 0.5 * dt * k1[i]);
    std::vector<cplx> k2 = nonlinear(tmp);
    for (int i = 0; i < K; ++i) tmp[i] = e1[i] * masked[i] + 0.5 * dt * k2[i];
    std::vector<cplx> k3 = nonlinear(tmp);
    for (int i = 0; i < K; ++i) tmp[i] = e2[i] * masked[i] + dt * e1[i] * k3[i];
    std::vector<cplx> k4 = nonlinear(tmp);

    std::vector<cplx> out(K);
    for (int i = 0; i < K; ++i)
        out[i] = e2[i] * masked[i] +
                 dt / 6.0 * (e2[i] * k1[i] + 2.0 * e1[i] * (k2[i] + k3[i]) + k4[i]);
    return out;
}

Field rhs(const ModelSpec& model, const Field& f, double dealias_fraction) {
    if (consistency_error(f) > 1e-10)
        throw std::invalid_argument("rhs: inconsistent Field");
    Stepper st(f.grid, model, dealias_fraction);
    return field_from_coeffs(f.grid, st.rhs_coeffs(f.coeffs));
}

Field step(const ModelSpec& model, const Field& f, double dt, double dealias_fraction) {
    Stepper st(f.grid, model, dealias_fraction);
    std::vector<cplx> c = st.step_coeffs(f.coeffs, dt);
    if (!all_finite(c)) throw NonFinite(dt, "step: non-finite state after one step");
    return field_from_coeffs(f.grid, std::move(c));
}

Trajectory evolve(const ModelSpec& model, const SolverConfig& cfg, const Field& f0,
                  const std::optional<ISymbolParams>& ip) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
    const double sqrt2pi = std::sqrt(kTwoPi);
    double l2 = std::sqrt(mass(f0));
    if (model.kind == ModelKind::gauged && l2 >= sqrt2pi)
        std::fprintf(stderr,
                     "warning: smallness condition violated: ||w0||_2 = %g >= sqrt(2 pi)\n", l2);

    Stepper st(f0.grid, model, cfg.dealias_fraction);
    Trajectory tr;
    auto push = [&](double t, const Field& f) {
        TrajectoryDiag d;
        d.mass = mass(f);
        d.E = energy_physical(f);
        d.max_abs = f.max_abs();
        if (ip) d.E1 = modified_energy_1(f, *ip);
        tr.times.push_back(t);
        tr.snapshots.push_back(f);
        tr.diag.push_back(d);
    };

    Field f = field_from_coeffs(f0.grid, f0.coeffs);
    push(0.0, f);
    long nsteps = std::lround(cfg.T_final / cfg.dt);
    std::vector<cplx> c = f.coeffs;
    for (long i = 0; i < nsteps; ++i) {
        c = st.step_coeffs(c, cfg.dt);
        double t = (i + 1) * cfg.dt;
        if (!all_finite(c)) throw NonFinite(t, "evolve: non-finite state at t=" + fmt_double(t));
        if ((i + 1) % cfg.sample_every == 0 || i + 1 == nsteps)
            push(t, field_from_coeffs(f0.grid, c));
    }
    return tr;
}

double dt_budget(const Field& f, double dealias_fraction) {
    double ximax = dealias_fraction * (f.grid.K / 2) * f.grid.dxi();
    double umax2 = 0.0;
    for (const auto& v : f.values) umax2 = std::max(umax2, std::norm(v));
    if (ximax * umax2 == 0.0) return 1e-2;
    return 0.5 / (ximax * umax2);
}

namespace {
Field rescaled(Field f, double target_l2) {
    double l2 = std::sqrt(mass(f));
    if (l2 == 0.0) return f;
    double a = target_l2 / l2;
    for (auto& v : f.values) v *= a;
    for (auto& v : f.coeffs) v *= a;
    return f;
}
}  // namespace

Field gaussian_data(const Grid& g, double center, double width, double target_l2) {
    std::vector<cplx> v(g.K);
    for (int j = 0; j < g.K; ++j) {
        double x = g.x(j) - center;
        v[j] = std::exp(-x * x / (2.0 * width * width));
    }
    return rescaled(field_from_values(g, std::move(v)), target_l2);
}

Field sech_data(const Grid& g, double center, double width, double phase_speed,
                double target_l2) {
    std::vector<cplx> v(g.K);
    for (int j = 0; j < g.K; ++j) {
        double x = g.x(j) - center;
        v[j] = std::polar(1.0 / std::cosh(x / width), phase_speed * x);
    }
    return rescaled(field_from_values(g, std::move(v)), target_l2);
}

Field rough_data(const Grid& g, double s, std::uint64_t seed, double target_l2,
                 int cutoff_mode) {
    if (cutoff_mode <= 0) cutoff_mode = g.kmax();
    std::uint64_t st = mix_seed(seed, 0xda7aULL);
    auto u01 = [&st]() {
        st += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = st;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return (z >> 11) * 0x1.0p-53;
    };
    auto gauss = [&]() {
        double u1 = std::max(u01(), 1e-300), u2 = u01();
        double r = std::sqrt(-2.0 * std::log(u1));
        return cplx{r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)} / std::sqrt(2.0);
    };
    std::vector<cplx> c(g.K, cplx{0.0, 0.0});
    for (int k = g.kmin() + 1; k <= g.kmax(); ++k) {
        if (std::abs(k) > cutoff_mode) continue;
        double amp = std::pow(1.0 + std::abs(g.xi(k)), -s - 0.5);
        c[g.index(k)] = amp * gauss();
    }
    return rescaled(field_from_coeffs(g, std::move(c)), target_l2);
}

Field embed_field(const Field& f, const Grid& big) {
    if (big.L != f.grid.L || big.K < f.grid.K)
        throw std::invalid_argument("embed_field: ambient grid must share L and be wider");
    std::vector<cplx> c(big.K, cplx{0.0, 0.0});
    for (int k = f.grid.kmin() + 1; k <= f.grid.kmax(); ++k) c[big.index(k)] = f.c(k);
    return field_from_coeffs(big, std::move(c));
}

Field restrict_field(const Field& f, const Grid& small) {
    if (small.L != f.grid.L || small.K > f.grid.K)
        throw std::invalid_argument("restrict_field: target grid must share L and be narrower");
    std::vector<cplx> c(small.K, cplx{0.0, 0.0});
    for (int k = small.kmin() + 1; k <= small.kmax(); ++k) c[small.index(k)] = f.c(k);
    return field_from_coeffs(small, std::move(c));
}

int support_band(const Field& f) {
    int band = 0;
    for (int k = f.grid.kmin(); k <= f.grid.kmax(); ++k)
        if (f.c(k) != cplx{0.0, 0.0}) band = std::max(band, std::abs(k));
    return band;
}

}  // namespace dnls
