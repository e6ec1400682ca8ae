#include <knncp/parallel.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace knncp {
namespace {
std::atomic<std::size_t> g_override{0};

std::size_t environment_workers() {
    if (const char* env = std::getenv("KNNCP_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) {
                return static_cast<std::size_t>(v);
            }
        } catch (const std::exception&) {
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}
} // namespace

std::size_t default_workers() {
    const std::size_t w = g_override.load();
    return w > 0 ? w : environment_workers();
}

void set_default_workers(std::size_t workers) {
    g_override.store(workers);
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t workers) {
    if (count == 0) {
        return;
    }
    if (workers == 0) {
        workers = default_workers();
    }
    workers = std::min(workers, count);
    if (workers <= 1) {
        body(0, count);
        return;
    }

    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) {
            break;
        }
        threads.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace knncp
