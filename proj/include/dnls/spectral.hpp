#ifndef DNLS_SPECTRAL_HPP
#define DNLS_SPECTRAL_HPP

#include <functional>
#include <vector>

#include "dnls/util.hpp"

namespace dnls {

// Periodic lattice of length L with K collocation points,
//   x_j  = -L/2 + j L/K,            j = 0..K-1
//   xi_k = (2 pi / L) k,            k = -K/2..K/2-1.
// The unpaired mode k = -K/2 has no negation partner and is zeroed on every
// Field ingestion, so the wavenumber lattice used by multilinear sums is
// closed under negation.
struct Grid {
    double L = 0.0;
    int K = 0;

    double dx() const { return L / K; }
    double dxi() const { return 2.0 * 3.14159265358979323846 / L; }
    double x(int j) const { return -L / 2.0 + j * dx(); }
    int kmin() const { return -K / 2; }
    int kmax() const { return K / 2 - 1; }
    double xi(int k) const { return k * dxi(); }
    int index(int k) const { return k + K / 2; }  // storage slot of mode k
    int mode(int i) const { return i - K / 2; }
    bool operator==(const Grid&) const = default;
};

Grid make_grid(double L, int K);

// Complex state with synchronized physical samples and spectral coefficients,
//   coeffs[index(k)] = (L/K) sum_j values[j] exp(-i x_j xi_k),
// the lattice surrogate of \int exp(-i x xi) f dx.
struct Field {
    Grid grid;
    std::vector<cplx> values;
    std::vector<cplx> coeffs;

    const cplx& c(int k) const { return coeffs[grid.index(k)]; }
    double max_abs() const;
};

Field field_from_values(const Grid& g, std::vector<cplx> values);
Field field_from_coeffs(const Grid& g, std::vector<cplx> coeffs);
Field zero_field(const Grid& g);

std::vector<cplx> to_spectral(const Grid& g, const std::vector<cplx>& values);
std::vector<cplx> to_physical(const Grid& g, const std::vector<cplx>& coeffs);

// max |values - F^{-1}(coeffs)| relative to max|f|; 0 for a consistent Field
double consistency_error(const Field& f);

// Fourier multiplier parameters for the smoothing operator I:
// m(xi) = 1 for |xi| <= N, (|xi|/N)^(s-1) beyond (continuous completion).
struct ISymbolParams {
    double N = 1.0;
    double s = 0.6;
};

// validates and warns (stderr) when s is outside (1/2, 2/3]
ISymbolParams make_isymbol_params(double N, double s);

double m_symbol(const ISymbolParams& p, double xi);

// output coeffs: sym(xi_k) * coeffs[k]
Field apply_symbol(const std::function<cplx(double)>& sym, const Field& f);

Field apply_i_operator(const ISymbolParams& p, const Field& f);

// || <xi>^s f^ ||_2 under the lattice Parseval normalization; s=0 gives ||f||_2
double sobolev_norm(const Field& f, double s);

double l2_norm(const Field& f);

namespace fft {
// in-place unnormalized DFT, sign = -1 forward / +1 backward (FFTW convention)
void dft(cplx* data, int n, int sign);
}

}  // namespace dnls

#endif
