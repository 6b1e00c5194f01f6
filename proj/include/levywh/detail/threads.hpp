#ifndef LEVYWH_DETAIL_THREADS_HPP
#define LEVYWH_DETAIL_THREADS_HPP

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace levywh {
namespace detail {

// Block-cyclic parallel for over [0, n). Work items must be independent and
// write only to their own slots, which keeps results identical for any
// thread count.
template <class Body>
inline void parallel_for(std::size_t n, int threads, Body&& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const int nt = static_cast<int>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (std::size_t i = t; i < n; i += nt) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace detail
} // namespace levywh

#endif
