#include "twinenv/thread_pool.hpp"

#include <algorithm>

namespace twinenv {

namespace {

inline void cpu_relax() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_ia32_pause();
#else
    std::this_thread::yield();
#endif
}

}  // namespace

unsigned ThreadPool::default_thread_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

ThreadPool& ThreadPool::global() {
    static ThreadPool pool;
    return pool;
}

ThreadPool::ThreadPool(unsigned threads) {
    if (threads < 1) threads = 1;
    workers_.reserve(threads - 1);
    for (unsigned i = 1; i < threads; ++i) {
        workers_.emplace_back([this] { worker_loop(); });
    }
}

ThreadPool::~ThreadPool() {
    stop_.store(true);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        wake_.notify_all();
    }
    for (auto& w : workers_) w.join();
}

void ThreadPool::slice(unsigned slot, size_t& begin, size_t& end) const {
    begin = count_ * slot / parts_;
    end = count_ * (slot + 1) / parts_;
}

void ThreadPool::run(size_t count, TaskFn fn, void* ctx) {
    if (count == 0) return;
    const size_t wanted = (count + MIN_GRAIN - 1) / MIN_GRAIN;
    const unsigned parts =
        static_cast<unsigned>(std::min<size_t>(thread_count(), wanted));
    if (parts <= 1 || workers_.empty()) {
        fn(ctx, 0, count);
        return;
    }

    fn_ = fn;
    ctx_ = ctx;
    count_ = count;
    parts_ = parts;
    remaining_.store(static_cast<unsigned>(workers_.size()));
    epoch_.fetch_add(1);
    if (sleepers_.load() > 0) {
        std::lock_guard<std::mutex> lock(mutex_);
        wake_.notify_all();
    }

    size_t begin = 0, end = 0;
    slice(0, begin, end);
    fn(ctx, begin, end);

    int spins = 0;
    while (remaining_.load(std::memory_order_acquire) != 0) {
        if (++spins > SPIN_ROUNDS) {
            std::this_thread::yield();
        } else {
            cpu_relax();
        }
    }
}

void ThreadPool::worker_loop() {
    const unsigned slot = next_slot_.fetch_add(1) + 1;  // slot 0 is the caller
    uint64_t seen = 0;
    while (true) {
        int spins = 0;
        while (epoch_.load() == seen && !stop_.load()) {
            if (++spins < SPIN_ROUNDS) {
                cpu_relax();
            } else {
                std::unique_lock<std::mutex> lock(mutex_);
                sleepers_.fetch_add(1);
                wake_.wait(lock, [&] { return epoch_.load() != seen || stop_.load(); });
                sleepers_.fetch_sub(1);
            }
        }
        if (stop_.load()) return;
        seen = epoch_.load();
        if (slot < parts_) {
            size_t begin = 0, end = 0;
            slice(slot, begin, end);
            if (begin < end) fn_(ctx_, begin, end);
        }
        remaining_.fetch_sub(1, std::memory_order_acq_rel);
    }
}

}  // namespace twinenv
