#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tspd
{
    // 0 means "use hardware concurrency".
    inline std::size_t resolve_workers(std::size_t workers)
    {
        if (workers == 0)
        {
            workers = std::max(1u, std::thread::hardware_concurrency());
        }
        return workers;
    }

    // Runs body(i) for i in [0, count) on up to `workers` threads.  Tasks are
    // handed out dynamically; callers write results into slot i so the output
    // is independent of scheduling.  The first exception is rethrown.
    template <typename Body>
    void parallel_for(std::size_t count, std::size_t workers, Body &&body)
    {
        workers = std::min(resolve_workers(workers), count);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < count; i++)
            {
                body(i);
            }
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (;;)
            {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                {
                    return;
                }
                try
                {
                    body(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                    {
                        error = std::current_exception();
                    }
                    next.store(count);
                }
            }
        };

        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; w++)
        {
            pool.emplace_back(worker);
        }
        worker();
        pool.clear();
        if (error)
        {
            std::rethrow_exception(error);
        }
    }
}
