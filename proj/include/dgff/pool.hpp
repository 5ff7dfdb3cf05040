#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dgff {

/// Index-parallel task runner. Tasks write to disjoint result slots, so
/// outputs never depend on the worker count or on scheduling order.
class ThreadPool {
public:
    explicit ThreadPool(int workers) : workers_(workers < 1 ? 1 : workers) {}

    int workers() const { return workers_; }

    /// Run fn(i) for every i in [0, count); blocks until all complete.
    void run_indexed(std::size_t count,
                     const std::function<void(std::size_t)>& fn) const {
        if (count == 0) return;
        const int threads =
            static_cast<int>(std::min<std::size_t>(workers_, count));
        if (threads <= 1) {
            for (std::size_t i = 0; i < count; ++i) fn(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto body = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> crew;
        crew.reserve(threads);
        for (int t = 0; t < threads; ++t) crew.emplace_back(body);
        for (auto& th : crew) th.join();
        if (failed.load()) std::rethrow_exception(error);
    }

private:
    int workers_;
};

}  // namespace dgff
