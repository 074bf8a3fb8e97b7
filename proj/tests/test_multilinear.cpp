#include <doctest.h>

#include <cmath>
#include <random>

#include "dnls/energies.hpp"
#include "dnls/evolution.hpp"
#include "dnls/multilinear.hpp"
#include "helpers.hpp"

using namespace dnls;
constexpr double kPi = 3.14159265358979323846;

namespace {
MultiplierN ones(int n) {
    return MultiplierN{n, [](const double*) { return cplx{1.0, 0.0}; }};
}
}  // namespace

TEST_CASE("Lambda_2(1; f) equals the mass") {
    Grid g = make_grid(2 * kPi, 12);
    Field f = testutil::random_field(g, 42);
    LambdaEstimate e = lambda_n(ones(2), f);
    CHECK(e.value.real() == doctest::Approx(mass(f)).epsilon(1e-10));
    CHECK(std::abs(e.value.imag()) < 1e-12 * mass(f));
    CHECK(e.stderr_val == 0.0);
}

TEST_CASE("zero field gives zero for every arity") {
    Grid g = make_grid(2 * kPi, 8);
    Field z = zero_field(g);
    for (int n : {2, 4, 6, 8}) {
        LambdaEstimate e = lambda_n(ones(n), z);
        CHECK(e.value == cplx{0.0, 0.0});
        CHECK(e.terms == 0);
    }
}

TEST_CASE("Lambda_4(xi2 + xi3) vanishes by slot symmetry") {
    Grid g = make_grid(2 * kPi, 16);
    for (unsigned seed : {3u, 7u, 11u}) {
        Field f = testutil::random_field(g, seed);
        MultiplierN M{4, [](const double* xi) { return cplx{xi[1] + xi[2], 0.0}; }};
        LambdaEstimate e = lambda_n(M, f);
        double scale = std::max(1.0, e.abs_scale);
        CHECK(std::abs(e.value) < 1e-10 * scale);
    }
}

TEST_CASE("lambda_n agrees with the naive full-lattice oracle") {
    Grid g = make_grid(3.0, 12);
    Field f = testutil::random_band_field(g, 5, 4);
    for (int n : {2, 4}) {
        MultiplierN M{n, [n](const double* xi) {
                          cplx v{0.0, 0.0};
                          for (int j = 0; j < n; ++j) v += cplx{xi[j] * xi[j], xi[j]};
                          return v;
                      }};
        cplx naive = testutil::naive_lambda(M.eval, n, f);
        cplx fast = lambda_n(M, f).value;
        CHECK(std::abs(naive - fast) < 1e-10 * std::max(1.0, std::abs(naive)));
    }
}

TEST_CASE("elongation bookkeeping") {
    MultiplierN M2{2, [](const double* xi) { return cplx{xi[0], xi[1]}; }};

    MultiplierN e1 = elongate(M2, 1, 2);
    double xi4[4] = {1.0, 2.0, 4.0, -7.0};
    CHECK(e1.eval(xi4) == cplx{7.0, -7.0});  // M2(xi1+xi2+xi3, xi4)

    MultiplierN eid = elongate(ones(2), 2, 2);
    CHECK(eid.eval(xi4) == cplx{1.0, 0.0});

    MultiplierN e2 = elongate(M2, 2, 2);
    double t[4] = {1.0, -1.0, 2.0, -2.0};
    CHECK(e2.eval(t) == cplx{1.0, -1.0});  // M2(1, -1+2-2)

    CHECK_THROWS(elongate(M2, 0, 2));
    CHECK_THROWS(elongate(M2, 3, 2));
    CHECK_THROWS(elongate(M2, 1, 3));
}

TEST_CASE("permutation symmetry of Lambda_n in odd/even multiplier slots") {
    Grid g = make_grid(2 * kPi, 16);
    Field f = testutil::random_field(g, 21);
    std::mt19937 rng(77);
    for (int trial = 0; trial < 6; ++trial) {
        double c1 = 0.3 + trial, c2 = 1.7 - trial, c3 = 0.5 * trial;
        MultiplierN M{4, [=](const double* xi) {
                          return cplx{c1 * xi[0] * xi[0] + c2 * xi[2], c3 * xi[1] * xi[3]};
                      }};
        // swap the two odd slots (1,3) and independently the even slots (2,4)
        bool swap_odd = rng() & 1, swap_even = rng() & 1;
        MultiplierN Mp{4, [=](const double* xi) {
                           double y[4] = {xi[0], xi[1], xi[2], xi[3]};
                           if (swap_odd) std::swap(y[0], y[2]);
                           if (swap_even) std::swap(y[1], y[3]);
                           return M.eval(y);
                       }};
        cplx a = lambda_n(M, f).value;
        cplx b = lambda_n(Mp, f).value;
        CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("reality: conjugate-reflection-symmetric multipliers give real Lambda") {
    Grid g = make_grid(2 * kPi, 16);
    Field f = testutil::random_field(g, 31);
    ISymbolParams p = make_isymbol_params(2.0, 0.6);

    MultiplierN mm{2, [p](const double* xi) {
                       return cplx{m_symbol(p, xi[0]) * xi[0] * m_symbol(p, xi[1]) * xi[1], 0.0};
                   }};
    MultiplierN q4{4, [](const double* xi) {
                       return cplx{xi[0] + xi[2] - xi[1] - xi[3], 0.0};
                   }};
    M4Evaluator m4(p);
    MultiplierN pm4{4, [m4](const double* xi) {
                        return cplx{m4(xi[0], xi[1], xi[2], xi[3]), 0.0};
                    }};
    for (const auto& M : {mm, q4, pm4}) {
        LambdaEstimate e = lambda_n(M, f);
        CHECK(std::abs(e.value.imag()) < 1e-9 * std::max(1.0, std::abs(e.value.real())));
    }
}

TEST_CASE("sampled estimator: zero field, consistency, sqrt(2) scaling") {
    Grid g = make_grid(2 * kPi, 16);
    LambdaEstimate z = lambda_n_sampled(ones(6), zero_field(g), 20000, 5);
    CHECK(z.value == cplx{0.0, 0.0});
    CHECK(z.stderr_val == 0.0);

    Field f = testutil::random_field(g, 8);
    MultiplierN M{6, [](const double* xi) {
                      return cplx{xi[0] * xi[0] + xi[1] - xi[4], 0.2 * xi[2]};
                  }};
    cplx exact = lambda_n(M, f).value;

    int hits = 0, trials = 40;
    for (int t = 0; t < trials; ++t) {
        LambdaEstimate e = lambda_n_sampled(M, f, 200000, 1000 + t);
        if (std::abs(e.value - exact) <= 3.0 * e.stderr_val + 1e-12) ++hits;
    }
    CHECK(hits >= trials - 2);  // ~1% miss rate at 3 sigma

    // doubling the sample count shrinks stderr by about sqrt(2)
    double s1 = 0.0, s2 = 0.0;
    for (int t = 0; t < 8; ++t) {
        s1 += lambda_n_sampled(M, f, 100000, 50 + t).stderr_val;
        s2 += lambda_n_sampled(M, f, 200000, 950 + t).stderr_val;
    }
    CHECK(s1 / s2 > 1.2);
    CHECK(s1 / s2 < 1.7);

    CHECK_THROWS(lambda_n_sampled(M, f, 100, 1));  // too few samples
}

TEST_CASE("sampled estimator is deterministic and thread-count independent") {
    Grid g = make_grid(2 * kPi, 16);
    Field f = testutil::random_field(g, 9);
    MultiplierN M{6, [](const double* xi) { return cplx{xi[0] - xi[3], 0.0}; }};
    LambdaOptions o1;
    o1.threads = 1;
    LambdaOptions o8;
    o8.threads = 8;
    LambdaEstimate a = lambda_n_sampled(M, f, 50000, 77, o1);
    LambdaEstimate b = lambda_n_sampled(M, f, 50000, 77, o8);
    CHECK(a.value == b.value);
    CHECK(a.stderr_val == b.stderr_val);
}

TEST_CASE("arity cap raises and the cap is overridable") {
    Grid g = make_grid(2 * kPi, 64);
    Field f = testutil::random_field(g, 10);
    CHECK_THROWS_AS((void)lambda_n(ones(6), f), ArityTooLarge);
    LambdaOptions opt;
    opt.max_tuples = 1;  // force the error even at tiny sizes
    CHECK_THROWS_AS((void)lambda_n(ones(4), f, opt), ArityTooLarge);
}

TEST_CASE("ddt_lambda_rhs: M == 1, n = 2 gives zero (mass conservation)") {
    Grid g = make_grid(2 * kPi, 16);
    Field f = testutil::random_field(g, 12);
    LambdaEstimate e = ddt_lambda_rhs(ones(2), f);
    CHECK(std::abs(e.value) < 1e-10 * std::max(1.0, e.abs_scale));
    LambdaEstimate z = ddt_lambda_rhs(ones(2), zero_field(g));
    CHECK(z.value == cplx{0.0, 0.0});
}

// slotwise chain-rule oracle: d/dt Lambda_n(M; w) computed by replacing one
// factor at a time with the equation's right side, against the elongation
// formula. Exact for band-limited states evolved without truncation.
TEST_CASE("ddt_lambda_rhs matches the slotwise chain-rule oracle") {
    Grid g = make_grid(2 * kPi, 32);
    Field f = testutil::random_band_field(g, 17, 2);
    Field rhs_f = rhs(ModelSpec{ModelKind::gauged}, f, 1.0);

    ISymbolParams p = make_isymbol_params(1.7, 0.6);
    MultiplierN M{2, [p](const double* xi) {
                      return cplx{m_symbol(p, xi[0]) * xi[0] * m_symbol(p, xi[1]) * xi[1], 0.0};
                  }};

    // oracle: naive lambda with the rhs substituted into each slot
    auto slot_lambda = [&](int slot) {
        const Grid& gg = g;
        double cn = gg.dxi() / (2 * kPi);
        cplx tot{0.0, 0.0};
        for (int k1 = gg.kmin(); k1 <= gg.kmax(); ++k1) {
            int k2 = -k1;
            if (k2 < gg.kmin() || k2 > gg.kmax()) continue;
            const Field& s1 = (slot == 0) ? rhs_f : f;
            const Field& s2 = (slot == 1) ? rhs_f : f;
            cplx g1 = s1.c(k1);
            cplx g2 = std::conj(s2.c(-k2));
            double xi[2] = {gg.xi(k1), gg.xi(k2)};
            tot += M.eval(xi) * g1 * g2;
        }
        return tot * cn;
    };
    cplx oracle = slot_lambda(0) + slot_lambda(1);
    cplx formula = ddt_lambda_rhs(M, f).value;
    CHECK(std::abs(oracle - formula) < 1e-9 * std::max(1.0, std::abs(oracle)));
}

TEST_CASE("ddt_lambda_rhs matches a centered FD along a gauged trajectory") {
    // band-limited data on a wide ambient grid, so no convolution output is
    // truncated during the FD window
    Grid g = make_grid(2 * kPi, 32);
    Field f0 = testutil::random_band_field(g, 23, 2);
    ISymbolParams p = make_isymbol_params(1.5, 0.6);
    MultiplierN M{2, [p](const double* xi) {
                      return cplx{m_symbol(p, xi[0]) * xi[0] * m_symbol(p, xi[1]) * xi[1], 0.0};
                  }};
    ModelSpec gauged{ModelKind::gauged};
    double dt = 1e-4;
    Field fp = step(gauged, f0, dt, 1.0);
    Field fm = step(gauged, f0, -dt, 1.0);
    cplx lp = lambda_n(M, fp).value, lm = lambda_n(M, fm).value;
    double fd = ((lp - lm) / (2.0 * dt)).real();
    double formula = ddt_lambda_rhs(M, f0).value.real();
    CHECK(fd == doctest::Approx(formula).epsilon(1e-6));
}
