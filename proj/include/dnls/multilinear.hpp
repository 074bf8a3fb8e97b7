#ifndef DNLS_MULTILINEAR_HPP
#define DNLS_MULTILINEAR_HPP

#include <cstdint>
#include <functional>

#include "dnls/spectral.hpp"

namespace dnls {

// Pointwise-evaluable function on the discrete hyperplane
// Gamma_n = { xi_1 + ... + xi_n = 0 }. eval receives xi[0..n-1].
struct MultiplierN {
    int n = 2;
    std::function<cplx(const double*)> eval;
};

struct LambdaEstimate {
    cplx value{0.0, 0.0};
    double stderr_val = 0.0;   // 0 for exact sums
    std::int64_t terms = 0;    // lattice tuples visited
    double abs_scale = 0.0;    // sum of |M * prod g_j| * C_n; conditioning of cancellations
};

struct LambdaOptions {
    std::int64_t max_tuples = 0;  // 0 -> per-arity defaults (256^3, 32^5, 16^7)
    int threads = 0;              // 0 -> default_threads()
};

// Exact lattice sum
//   Lambda_n(M; f) = C_n sum_{xi_1+..+xi_n=0} M(xi) prod_j ghat_j(xi_j),
// ghat_j = fhat for odd j and ghat_j(xi) = conj(fhat(-xi)) for even j, with
// C_n = (dxi/2pi)^(n-1) calibrated so Lambda_2(1; f) = ||f||_2^2. Free slots
// iterate over the nonzero support of their factor; xi_n is determined and
// tuples leaving the lattice range are skipped. Throws ArityTooLarge when the
// tuple count exceeds the cap (use lambda_n_sampled instead).
LambdaEstimate lambda_n(const MultiplierN& M, const Field& f, const LambdaOptions& opt = {});

// Unbiased importance-sampled estimate over Gamma_n, free slots drawn
// proportional to |ghat_j|, with stderr from the sample variance.
// Deterministic given seed, independent of the thread count.
LambdaEstimate lambda_n_sampled(const MultiplierN& M, const Field& f, std::int64_t samples,
                                std::uint64_t seed, const LambdaOptions& opt = {});

// Elongation X^k_j: replace xi_j by xi_j + ... + xi_{j+k} (j is 1-based).
MultiplierN elongate(const MultiplierN& M, int j, int k);

// Right side of the d/dt identity for Lambda_n(M; w) along the gauged flow:
//   i Lambda_n(M sum_j (-1)^j xi_j^2)
//   - i Lambda_{n+2}(sum_j X2_j(M) xi_{j+1})
//   + (i/2) Lambda_{n+4}(sum_j (-1)^{j-1} X4_j(M)).
// Valid as a time derivative only when f solves the gauged equation.
LambdaEstimate ddt_lambda_rhs(const MultiplierN& M, const Field& f,
                              const LambdaOptions& opt = {});

}  // namespace dnls

#endif
