#include "dnls/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dnls {

namespace fft {

namespace {
std::mutex g_plan_mutex;
std::map<std::pair<int, int>, fftw_plan> g_plans;

fftw_plan plan_for(int n, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
    std::vector<cplx> tmp(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(tmp.data()),
                                   reinterpret_cast<fftw_complex*>(tmp.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    g_plans.emplace(key, p);
    return p;
}
}  // namespace

void dft(cplx* data, int n, int sign) {
    fftw_plan p = plan_for(n, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

}  // namespace fft

Grid make_grid(double L, int K) {
    if (!(L > 0.0)) throw std::invalid_argument("make_grid: L must be positive");
    if (K < 8) throw std::invalid_argument("make_grid: K must be >= 8");
    if (K % 2 != 0) throw std::invalid_argument("make_grid: K must be even");
    return Grid{L, K};
}

// DFT index k and storage index are related through the grid offset -L/2:
// exp(-i x_j xi_k) = (-1)^k exp(-2 pi i j k / K).
std::vector<cplx> to_spectral(const Grid& g, const std::vector<cplx>& values) {
    std::vector<cplx> buf = values;
    fft::dft(buf.data(), g.K, -1);
    std::vector<cplx> coeffs(g.K);
    const double scale = g.L / g.K;
    for (int k = g.kmin(); k <= g.kmax(); ++k) {
        int src = (k % g.K + g.K) % g.K;
        double sgn = (k & 1) ? -1.0 : 1.0;
        coeffs[g.index(k)] = scale * sgn * buf[src];
    }
    return coeffs;
}

std::vector<cplx> to_physical(const Grid& g, const std::vector<cplx>& coeffs) {
    std::vector<cplx> buf(g.K, cplx{0.0, 0.0});
    for (int k = g.kmin(); k <= g.kmax(); ++k) {
        int dst = (k % g.K + g.K) % g.K;
        double sgn = (k & 1) ? -1.0 : 1.0;
        buf[dst] = sgn * coeffs[g.index(k)];
    }
    fft::dft(buf.data(), g.K, +1);
    const double scale = 1.0 / g.L;
    for (auto& v : buf) v *= scale;
    return buf;
}

Field field_from_values(const Grid& g, std::vector<cplx> values) {
    if (static_cast<int>(values.size()) != g.K)
        throw std::invalid_argument("field_from_values: size mismatch");
    Field f;
    f.grid = g;
    f.coeffs = to_spectral(g, values);
    f.coeffs[g.index(g.kmin())] = 0.0;  // unpaired mode
    f.values = to_physical(g, f.coeffs);
    return f;
}

Field field_from_coeffs(const Grid& g, std::vector<cplx> coeffs) {
    if (static_cast<int>(coeffs.size()) != g.K)
        throw std::invalid_argument("field_from_coeffs: size mismatch");
    Field f;
    f.grid = g;
    f.coeffs = std::move(coeffs);
    f.coeffs[g.index(g.kmin())] = 0.0;
    f.values = to_physical(g, f.coeffs);
    return f;
}

Field zero_field(const Grid& g) {
    Field f;
    f.grid = g;
    f.values.assign(g.K, cplx{0.0, 0.0});
    f.coeffs.assign(g.K, cplx{0.0, 0.0});
    return f;
}

double Field::max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
}

double consistency_error(const Field& f) {
    auto back = to_physical(f.grid, f.coeffs);
    double m = 0.0, scale = 0.0;
    for (int j = 0; j < f.grid.K; ++j) {
        m = std::max(m, std::abs(back[j] - f.values[j]));
        scale = std::max(scale, std::abs(f.values[j]));
    }
    return scale > 0.0 ? m / scale : m;
}

ISymbolParams make_isymbol_params(double N, double s) {
    if (!(N >= 1.0)) throw std::invalid_argument("ISymbolParams: N must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("ISymbolParams: s must be in (0,1)");
    if (!(s > 0.5 && s <= 2.0 / 3.0))
        std::fprintf(stderr, "warning: s=%g outside the fixed range (1/2, 2/3]\n", s);
    return ISymbolParams{N, s};
}

double m_symbol(const ISymbolParams& p, double xi) {
    double a = std::abs(xi);
    if (a <= p.N) return 1.0;
    return std::pow(a / p.N, p.s - 1.0);
}

Field apply_symbol(const std::function<cplx(double)>& sym, const Field& f) {
    std::vector<cplx> c(f.grid.K);
    for (int k = f.grid.kmin(); k <= f.grid.kmax(); ++k)
        c[f.grid.index(k)] = sym(f.grid.xi(k)) * f.c(k);
    return field_from_coeffs(f.grid, std::move(c));
}

Field apply_i_operator(const ISymbolParams& p, const Field& f) {
    std::vector<cplx> c(f.grid.K);
    for (int k = f.grid.kmin(); k <= f.grid.kmax(); ++k)
        c[f.grid.index(k)] = m_symbol(p, f.grid.xi(k)) * f.c(k);
    return field_from_coeffs(f.grid, std::move(c));
}

double sobolev_norm(const Field& f, double s) {
    const Grid& g = f.grid;
    const double w = g.dxi() / (2.0 * 3.14159265358979323846);
    double acc = 0.0;
    for (int k = g.kmin(); k <= g.kmax(); ++k) {
        double jap = 1.0 + std::abs(g.xi(k));
        acc += std::pow(jap, 2.0 * s) * std::norm(f.c(k)) * w;
    }
    return std::sqrt(acc);
}

double l2_norm(const Field& f) { return sobolev_norm(f, 0.0); }

}  // namespace dnls
