#pragma once
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sdfkit {

// Minimal fork-join pool. Work items are indexed, results land in caller-owned
// slots, so output is identical no matter how the chunks are scheduled.
class ThreadPool {
public:
    explicit ThreadPool(unsigned jobs = 0) {
        if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
        jobs_ = jobs;
        for (unsigned i = 1; i < jobs; ++i)
            workers_.emplace_back([this] { worker(); });
    }

    ~ThreadPool() {
        {
            std::lock_guard<std::mutex> lk(mu_);
            done_ = true;
        }
        cv_.notify_all();
        for (auto& t : workers_) t.join();
    }

    unsigned jobs() const { return jobs_; }

    // Runs fn(i) for i in [0, n). Blocks until all items finish.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
        if (n == 0) return;
        if (jobs_ == 1 || n == 1) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> live{0};
        {
            std::lock_guard<std::mutex> lk(mu_);
            task_ = [&next, &fn, n] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    fn(i);
                }
            };
            live.store(workers_.size());
            pending_ = &live;
            ++generation_;
        }
        cv_.notify_all();
        task_();  // caller participates
        std::unique_lock<std::mutex> lk(mu_);
        done_cv_.wait(lk, [&live] { return live.load() == 0; });
        task_ = nullptr;
        pending_ = nullptr;
    }

private:
    void worker() {
        std::uint64_t seen = 0;
        for (;;) {
            std::function<void()> t;
            std::atomic<std::size_t>* pending = nullptr;
            {
                std::unique_lock<std::mutex> lk(mu_);
                cv_.wait(lk, [this, seen] { return done_ || generation_ != seen; });
                if (done_) return;
                seen = generation_;
                t = task_;
                pending = pending_;
            }
            if (t) t();
            if (pending && pending->fetch_sub(1) == 1) {
                std::lock_guard<std::mutex> lk(mu_);
                done_cv_.notify_all();
            }
        }
    }

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable cv_, done_cv_;
    std::function<void()> task_;
    std::atomic<std::size_t>* pending_ = nullptr;
    std::uint64_t generation_ = 0;
    bool done_ = false;
    unsigned jobs_ = 1;
};

} // namespace sdfkit
