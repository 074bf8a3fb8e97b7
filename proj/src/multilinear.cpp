#include "dnls/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dnls {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

struct SlotTables {
    // per parity: dense value table over modes [kmin..kmax] and support list
    std::vector<cplx> val_odd, val_even;
    std::vector<int> supp_odd, supp_even;
    int kmin = 0, kmax = 0;

    const std::vector<cplx>& vals(int slot) const { return (slot % 2 == 0) ? val_odd : val_even; }
    const std::vector<int>& supp(int slot) const { return (slot % 2 == 0) ? supp_odd : supp_even; }
    cplx value(int slot, int k) const { return vals(slot)[k - kmin]; }
};

SlotTables make_tables(const Field& f) {
    const Grid& g = f.grid;
    SlotTables t;
    t.kmin = g.kmin();
    t.kmax = g.kmax();
    int n = g.K;
    t.val_odd.assign(n, cplx{0.0, 0.0});
    t.val_even.assign(n, cplx{0.0, 0.0});
    for (int k = t.kmin; k <= t.kmax; ++k) {
        t.val_odd[k - t.kmin] = f.c(k);
        int neg = -k;
        t.val_even[k - t.kmin] =
            (neg >= t.kmin && neg <= t.kmax) ? std::conj(f.c(neg)) : cplx{0.0, 0.0};
    }
    for (int k = t.kmin; k <= t.kmax; ++k) {
        if (t.val_odd[k - t.kmin] != cplx{0.0, 0.0}) t.supp_odd.push_back(k);
        if (t.val_even[k - t.kmin] != cplx{0.0, 0.0}) t.supp_even.push_back(k);
    }
    return t;
}

std::int64_t default_cap(int n) {
    switch (n) {
        case 2: return std::int64_t{1} << 40;
        case 4: return std::int64_t{256} * 256 * 256;
        case 6: return std::int64_t{32} * 32 * 32 * 32 * 32;
        case 8: {
            std::int64_t c = 1;
            for (int i = 0; i < 7; ++i) c *= 16;
            return c;
        }
        default: throw std::invalid_argument("lambda_n: arity must be one of 2,4,6,8");
    }
}

double prefactor(const Grid& g, int n) {
    double c = 1.0;
    for (int i = 0; i < n - 1; ++i) c *= g.dxi() / kTwoPi;
    return c;
}

}  // namespace

LambdaEstimate lambda_n(const MultiplierN& M, const Field& f, const LambdaOptions& opt) {
    const int n = M.n;
    if (n < 2 || n > 8 || n % 2 != 0)
        throw std::invalid_argument("lambda_n: arity must be one of 2,4,6,8");
    const Grid& g = f.grid;
    SlotTables tab = make_tables(f);

    std::int64_t count = 1;
    for (int j = 0; j < n - 1; ++j) {
        count *= static_cast<std::int64_t>(tab.supp(j).size());
        if (count == 0) return LambdaEstimate{};
    }
    std::int64_t cap = opt.max_tuples > 0 ? opt.max_tuples : default_cap(n);
    if (count > cap)
        throw ArityTooLarge("lambda_n: " + std::to_string(count) +
                            " tuples exceeds cap; use lambda_n_sampled");

    const double dxi = g.dxi();
    const double cn = prefactor(g, n);
    const auto& supp0 = tab.supp(0);
    const std::int64_t nblocks = static_cast<std::int64_t>(supp0.size());
    std::vector<cplx> partial(nblocks, cplx{0.0, 0.0});
    std::vector<double> partial_abs(nblocks, 0.0);
    std::vector<std::int64_t> partial_terms(nblocks, 0);

    parallel_blocks(
        nblocks,
        [&](std::int64_t b) {
            double xi[8];
            int ks[8];
            cplx prod[8];
            cplx acc{0.0, 0.0};
            double acc_abs = 0.0;
            std::int64_t terms = 0;
            ks[0] = supp0[static_cast<std::size_t>(b)];
            xi[0] = ks[0] * dxi;
            prod[0] = tab.value(0, ks[0]);

            // depth-first over free slots 1..n-2; slot n-1 is determined
            int depth = 1;
            std::size_t pos[8] = {0};
            for (;;) {
                if (depth == n - 1) {
                    int ksum = 0;
                    for (int j = 0; j < n - 1; ++j) ksum += ks[j];
                    int klast = -ksum;
                    if (klast >= tab.kmin && klast <= tab.kmax) {
                        cplx glast = tab.value(n - 1, klast);
                        if (glast != cplx{0.0, 0.0}) {
                            xi[n - 1] = klast * dxi;
                            cplx contrib = M.eval(xi) * prod[n - 2] * glast;
                            acc += contrib;
                            acc_abs += std::abs(contrib);
                            ++terms;
                        }
                    }
                    --depth;
                    if (depth == 0) break;
                    ++pos[depth];
                    continue;
                }
                const auto& sp = tab.supp(depth);
                if (pos[depth] >= sp.size()) {
                    pos[depth] = 0;
                    --depth;
                    if (depth == 0) break;
                    ++pos[depth];
                    continue;
                }
                ks[depth] = sp[pos[depth]];
                xi[depth] = ks[depth] * dxi;
                prod[depth] = prod[depth - 1] * tab.value(depth, ks[depth]);
                ++depth;
            }
            partial[b] = acc;
            partial_abs[b] = acc_abs;
            partial_terms[b] = terms;
        },
        opt.threads);

    LambdaEstimate out;
    for (std::int64_t b = 0; b < nblocks; ++b) {
        out.value += partial[b];
        out.abs_scale += partial_abs[b];
        out.terms += partial_terms[b];
    }
    out.value *= cn;
    out.abs_scale *= cn;
    return out;
}

LambdaEstimate lambda_n_sampled(const MultiplierN& M, const Field& f, std::int64_t samples,
                                std::uint64_t seed, const LambdaOptions& opt) {
    const int n = M.n;
    if (n < 2 || n > 8 || n % 2 != 0)
        throw std::invalid_argument("lambda_n_sampled: arity must be one of 2,4,6,8");
    if (samples < 10000)
        throw std::invalid_argument("lambda_n_sampled: need at least 1e4 samples");
    const Grid& g = f.grid;
    SlotTables tab = make_tables(f);

    // per-parity proposal: p(k) proportional to |ghat(k)| over the support
    struct Proposal {
        std::vector<int> modes;
        std::vector<double> cdf;  // cumulative, last = total
        double total = 0.0;
    };
    auto build = [&](int slot) {
        Proposal pr;
        for (int k : tab.supp(slot)) {
            pr.modes.push_back(k);
            pr.total += std::abs(tab.value(slot, k));
            pr.cdf.push_back(pr.total);
        }
        return pr;
    };
    Proposal prop[2] = {build(0), build(1)};
    // DegenerateWeight: identically-zero integrand, exact 0
    if (prop[0].total == 0.0 || prop[1].total == 0.0) return LambdaEstimate{};

    const double dxi = g.dxi();
    const double cn = prefactor(g, n);

    const int nblocks = 256;
    std::int64_t per_block = (samples + nblocks - 1) / nblocks;
    std::vector<cplx> bsum(nblocks, cplx{0.0, 0.0});
    std::vector<double> bsq(nblocks, 0.0), babs(nblocks, 0.0);

    parallel_blocks(
        nblocks,
        [&](std::int64_t b) {
            std::int64_t lo = b * per_block, hi = std::min<std::int64_t>(samples, lo + per_block);
            cplx acc{0.0, 0.0};
            double accsq = 0.0, accabs = 0.0;
            double xi[8];
            for (std::int64_t i = lo; i < hi; ++i) {
                std::uint64_t st = mix_seed(seed, static_cast<std::uint64_t>(i));
                auto next_u01 = [&st]() {
                    st += 0x9e3779b97f4a7c15ULL;
                    std::uint64_t z = st;
                    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
                    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
                    z ^= z >> 31;
                    return (z >> 11) * 0x1.0p-53;
                };
                cplx w{1.0, 0.0};
                int ksum = 0;
                for (int j = 0; j < n - 1; ++j) {
                    const Proposal& pr = prop[j % 2];
                    double u = next_u01() * pr.total;
                    std::size_t idx =
                        std::lower_bound(pr.cdf.begin(), pr.cdf.end(), u) - pr.cdf.begin();
                    if (idx >= pr.modes.size()) idx = pr.modes.size() - 1;
                    int k = pr.modes[idx];
                    double p = std::abs(tab.value(j, k)) / pr.total;
                    w *= tab.value(j, k) / p;
                    xi[j] = k * dxi;
                    ksum += k;
                }
                cplx v{0.0, 0.0};
                int klast = -ksum;
                if (klast >= tab.kmin && klast <= tab.kmax) {
                    cplx glast = tab.value(n - 1, klast);
                    if (glast != cplx{0.0, 0.0}) {
                        xi[n - 1] = klast * dxi;
                        v = M.eval(xi) * w * glast * cn;
                    }
                }
                acc += v;
                accsq += std::norm(v);
                accabs += std::abs(v);
            }
            bsum[b] = acc;
            bsq[b] = accsq;
            babs[b] = accabs;
        },
        opt.threads);

    cplx total{0.0, 0.0};
    double totsq = 0.0, totabs = 0.0;
    for (int b = 0; b < nblocks; ++b) {
        total += bsum[b];
        totsq += bsq[b];
        totabs += babs[b];
    }
    LambdaEstimate out;
    out.terms = samples;
    out.value = total / static_cast<double>(samples);
    double var = totsq / samples - std::norm(out.value);
    out.stderr_val = std::sqrt(std::max(0.0, var) / samples);
    out.abs_scale = totabs / samples;
    return out;
}

MultiplierN elongate(const MultiplierN& M, int j, int k) {
    if (j < 1 || j > M.n) throw std::invalid_argument("elongate: index out of range");
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("elongate: k must be even and >= 2");
    int n = M.n;
    auto base = M.eval;
    MultiplierN out;
    out.n = n + k;
    out.eval = [base, n, j, k](const double* xi) {
        double sub[8];
        for (int i = 0; i < j - 1; ++i) sub[i] = xi[i];
        double grp = 0.0;
        for (int i = j - 1; i <= j - 1 + k; ++i) grp += xi[i];
        sub[j - 1] = grp;
        for (int i = j; i < n; ++i) sub[i] = xi[i + k];
        return base(sub);
    };
    return out;
}

LambdaEstimate ddt_lambda_rhs(const MultiplierN& M, const Field& f, const LambdaOptions& opt) {
    const int n = M.n;
    auto base = M.eval;

    MultiplierN m1;
    m1.n = n;
    m1.eval = [base, n](const double* xi) {
        double s = 0.0;
        for (int j = 1; j <= n; ++j) s += ((j % 2 == 0) ? 1.0 : -1.0) * xi[j - 1] * xi[j - 1];
        return base(xi) * s;
    };

    std::vector<MultiplierN> x2(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) x2[j - 1] = elongate(M, j, 2);
    MultiplierN m2;
    m2.n = n + 2;
    m2.eval = [x2, n](const double* xi) {
        cplx s{0.0, 0.0};
        for (int j = 1; j <= n; ++j) s += x2[j - 1].eval(xi) * xi[j];  // xi_{j+1}, 0-based j
        return s;
    };

    std::vector<MultiplierN> x4(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) x4[j - 1] = elongate(M, j, 4);
    MultiplierN m3;
    m3.n = n + 4;
    m3.eval = [x4, n](const double* xi) {
        cplx s{0.0, 0.0};
        for (int j = 1; j <= n; ++j) s += ((j % 2 == 1) ? 1.0 : -1.0) * x4[j - 1].eval(xi);
        return s;
    };

    LambdaEstimate t1 = lambda_n(m1, f, opt);
    LambdaEstimate t2 = lambda_n(m2, f, opt);
    LambdaEstimate t3 = lambda_n(m3, f, opt);

    const cplx I{0.0, 1.0};
    LambdaEstimate out;
    out.value = I * t1.value - I * t2.value + 0.5 * I * t3.value;
    out.stderr_val = std::sqrt(t1.stderr_val * t1.stderr_val + t2.stderr_val * t2.stderr_val +
                               0.25 * t3.stderr_val * t3.stderr_val);
    out.terms = t1.terms + t2.terms + t3.terms;
    out.abs_scale = t1.abs_scale + t2.abs_scale + 0.5 * t3.abs_scale;
    return out;
}

}  // namespace dnls
