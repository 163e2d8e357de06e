#include "spdelab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace spdelab {

namespace {

std::atomic<int> forced_workers{0};
thread_local bool inside_worker = false;

}  // namespace

int worker_count()
{
    if (int forced = forced_workers.load(); forced > 0) return forced;
    if (const char* env = std::getenv("SPDE_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_worker_count(int n)
{
    forced_workers.store(n > 0 ? n : 0);
}

void parallel_for(int n, const std::function<void(int)>& fn)
{
    const int workers = std::min(worker_count(), n);
    if (workers <= 1 || inside_worker) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        inside_worker = true;
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
        inside_worker = false;
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace spdelab
