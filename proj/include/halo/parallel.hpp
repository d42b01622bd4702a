#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace halo {

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Results
// land at their own index, so output order never depends on scheduling. If
// any call throws, the exception for the lowest index is rethrown.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, Fn&& fn, unsigned max_threads = 0) {
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errors(n);
    unsigned workers = max_threads ? max_threads : std::thread::hardware_concurrency();
    workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1)));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace halo
