#ifndef DNLS_UTIL_HPP
#define DNLS_UTIL_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnls {

using cplx = std::complex<double>;

struct ArityTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFinite : std::runtime_error {
    double t;
    explicit NonFinite(double t_, const std::string& what)
        : std::runtime_error(what), t(t_) {}
};
struct CalibrationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SmallnessViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientDecades : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Global worker-thread count for parallel reductions (set once by the CLI).
int default_threads();
void set_default_threads(int n);

// Runs fn(b) for b = 0..nblocks-1 across worker threads. Callers that reduce
// floating-point sums must accumulate per-block partials and combine them in
// block order afterwards, so results do not depend on the thread count.
void parallel_blocks(std::int64_t nblocks, const std::function<void(std::int64_t)>& fn,
                     int threads = 0);

// splitmix64; used to derive independent RNG streams from (seed, stream id)
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Printed representation used by every report writer: shortest round-trip
// decimal so emitted bytes are stable across runs.
std::string fmt_double(double v);

}  // namespace dnls

#endif
