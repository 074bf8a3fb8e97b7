#ifndef DNLS_TEST_HELPERS_HPP
#define DNLS_TEST_HELPERS_HPP

#include <functional>
#include <random>
#include <vector>

#include "dnls/spectral.hpp"

// Test-only oracles, kept independent of the library's summation path:
// a naive Lambda_n that loops over the full lattice with no support pruning.

namespace testutil {

using dnls::cplx;
using dnls::Field;
using dnls::Grid;

inline cplx naive_ghat(const Field& f, int slot /*0-based*/, int k) {
    const Grid& g = f.grid;
    if (k < g.kmin() || k > g.kmax()) return {0.0, 0.0};
    if (slot % 2 == 0) return f.c(k);
    int neg = -k;
    if (neg < g.kmin() || neg > g.kmax()) return {0.0, 0.0};
    return std::conj(f.c(neg));
}

// direct full-lattice sum; fine for K <= 16 and n <= 4 (and n = 6 at K <= 12)
inline cplx naive_lambda(const std::function<cplx(const double*)>& M, int n, const Field& f) {
    const Grid& g = f.grid;
    double cn = 1.0;
    for (int i = 0; i < n - 1; ++i) cn *= g.dxi() / (2.0 * 3.14159265358979323846);
    std::vector<int> ks(n, g.kmin());
    cplx total{0.0, 0.0};
    for (;;) {
        int sum = 0;
        for (int j = 0; j < n - 1; ++j) sum += ks[j];
        int klast = -sum;
        if (klast >= g.kmin() && klast <= g.kmax()) {
            cplx prod{1.0, 0.0};
            double xi[8];
            for (int j = 0; j < n - 1; ++j) {
                prod *= naive_ghat(f, j, ks[j]);
                xi[j] = g.xi(ks[j]);
            }
            prod *= naive_ghat(f, n - 1, klast);
            xi[n - 1] = g.xi(klast);
            if (prod != cplx{0.0, 0.0}) total += M(xi) * prod;
        }
        int j = 0;
        for (; j < n - 1; ++j) {
            if (++ks[j] <= g.kmax()) break;
            ks[j] = g.kmin();
        }
        if (j == n - 1) break;
    }
    return total * cn;
}

inline Field random_field(const Grid& g, unsigned seed, double amp = 1.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<cplx> v(g.K);
    for (auto& z : v) z = amp * cplx{nd(rng), nd(rng)};
    return dnls::field_from_values(g, std::move(v));
}

inline Field random_band_field(const Grid& g, unsigned seed, int band, double decay = 1.1) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<cplx> c(g.K, cplx{0.0, 0.0});
    for (int k = -band; k <= band; ++k)
        c[g.index(k)] = std::pow(1.0 + std::abs(k), -decay) * cplx{nd(rng), nd(rng)};
    return dnls::field_from_coeffs(g, std::move(c));
}

}  // namespace testutil

#endif
