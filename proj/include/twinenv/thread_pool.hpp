#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <thread>
#include <vector>

namespace twinenv {

// Fork-join pool for uniform element-wise batch work. parallel_for carves
// [0, count) into one contiguous slice per participating thread and blocks
// until all slices are done; the calling thread works on slice 0. Dispatch
// never allocates, so timed step loops stay allocation-free. Workers spin
// briefly between tasks before sleeping, which keeps per-step dispatch cheap
// while a benchmark is running.
class ThreadPool {
public:
    explicit ThreadPool(unsigned threads = default_thread_count());
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    unsigned thread_count() const { return static_cast<unsigned>(workers_.size()) + 1; }

    // fn(begin, end) is invoked on disjoint ranges covering [0, count).
    // Ranges are assigned by thread slot, so results that are written to
    // disjoint output slices are identical for any thread count.
    template <typename Fn>
    void parallel_for(size_t count, const Fn& fn) {
        run(
            count,
            [](void* ctx, size_t b, size_t e) { (*static_cast<const Fn*>(ctx))(b, e); },
            const_cast<void*>(static_cast<const void*>(&fn)));
    }

    static unsigned default_thread_count();
    static ThreadPool& global();

private:
    using TaskFn = void (*)(void* ctx, size_t begin, size_t end);

    // Elements per slice below which forking is not worth the handoff.
    static constexpr size_t MIN_GRAIN = 64;
    static constexpr int SPIN_ROUNDS = 20000;

    void run(size_t count, TaskFn fn, void* ctx);
    void worker_loop();
    void slice(unsigned slot, size_t& begin, size_t& end) const;

    std::vector<std::thread> workers_;

    std::atomic<uint64_t> epoch_{0};
    std::atomic<unsigned> remaining_{0};
    std::atomic<unsigned> sleepers_{0};
    std::atomic<bool> stop_{false};

    TaskFn fn_ = nullptr;
    void* ctx_ = nullptr;
    size_t count_ = 0;
    unsigned parts_ = 1;

    std::mutex mutex_;
    std::condition_variable wake_;
    std::atomic<unsigned> next_slot_{0};
};

}  // namespace twinenv
