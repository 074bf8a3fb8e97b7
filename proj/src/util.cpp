#include "dnls/util.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <thread>

namespace dnls {

namespace {
std::atomic<int> g_threads{0};
}

int default_threads() {
    int n = g_threads.load();
    if (n > 0) return n;
    n = static_cast<int>(std::thread::hardware_concurrency());
    return n > 0 ? n : 1;
}

void set_default_threads(int n) { g_threads.store(n); }

void parallel_blocks(std::int64_t nblocks, const std::function<void(std::int64_t)>& fn,
                     int threads) {
    if (threads <= 0) threads = default_threads();
    if (threads == 1 || nblocks <= 1) {
        for (std::int64_t b = 0; b < nblocks; ++b) fn(b);
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::int64_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            fn(b);
        }
    };
    std::vector<std::thread> pool;
    int nt = static_cast<int>(std::min<std::int64_t>(threads, nblocks));
    pool.reserve(nt);
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string fmt_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, end);
}

}  // namespace dnls
