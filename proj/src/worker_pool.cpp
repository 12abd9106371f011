#include "stochkin/worker_pool.hpp"

#include <algorithm>

#include "stochkin/errors.hpp"

namespace stochkin {

namespace {
// Spin budget before falling back to the condition variable. Yield keeps
// spinners from starving in-progress tasks when threads outnumber cores.
constexpr int kSpinRounds = 2'000;
}  // namespace

WorkerPool::WorkerPool(unsigned thread_count) {
  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const unsigned capped = std::min(thread_count, hardware);
  const unsigned extra = capped > 0 ? capped - 1 : 0;  // caller participates
  threads_.reserve(extra);
  for (unsigned i = 0; i < extra; ++i)
    threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
  stopping_.store(true, std::memory_order_release);
  {
    std::lock_guard<std::mutex> lock(mutex_);
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run(std::uint64_t count,
                     const std::function<void(std::uint64_t)>& task) {
  if (count >> 32)
    throw ContractError("WorkerPool::run: task count must be < 2^32");
  std::uint32_t generation;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    task_ = &task;
    task_count_ = count;
    pending_.store(count, std::memory_order_relaxed);
    generation = ++generation_;
    // Publishing the new claim word releases the job state to spinners.
    claim_.store(static_cast<std::uint64_t>(generation) << 32,
                 std::memory_order_release);
  }
  wake_.notify_all();

  work_through_job(generation);

  for (int spin = 0; spin < kSpinRounds; ++spin) {
    if (pending_.load(std::memory_order_acquire) == 0) break;
    std::this_thread::yield();
  }
  if (pending_.load(std::memory_order_acquire) != 0) {
    std::unique_lock<std::mutex> lock(mutex_);
    finished_.wait(lock, [&] {
      return pending_.load(std::memory_order_acquire) == 0;
    });
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    task_ = nullptr;
  }
}

void WorkerPool::worker_loop() {
  std::uint32_t seen_generation = 0;
  for (;;) {
    std::uint32_t next_generation = seen_generation;
    for (int spin = 0; spin < kSpinRounds; ++spin) {
      if (stopping_.load(std::memory_order_acquire)) return;
      const auto word = claim_.load(std::memory_order_acquire);
      const auto generation = static_cast<std::uint32_t>(word >> 32);
      if (generation != seen_generation) {
        next_generation = generation;
        break;
      }
      std::this_thread::yield();
    }
    if (next_generation == seen_generation) {
      std::unique_lock<std::mutex> lock(mutex_);
      wake_.wait(lock, [&] {
        return stopping_.load(std::memory_order_acquire) ||
               generation_ != seen_generation;
      });
      if (stopping_.load(std::memory_order_acquire)) return;
      next_generation = generation_;
    }
    seen_generation = next_generation;
    work_through_job(seen_generation);
  }
}

void WorkerPool::work_through_job(std::uint32_t generation) {
  for (;;) {
    // Claim by CAS so the claim is atomically tied to the generation it was
    // read under; a worker lingering from an earlier job can never consume
    // an index belonging to the current one.
    std::uint64_t word = claim_.load(std::memory_order_acquire);
    std::uint64_t index;
    do {
      if (static_cast<std::uint32_t>(word >> 32) != generation) return;
      index = word & 0xFFFFFFFFull;
      if (index >= task_count_) return;
    } while (!claim_.compare_exchange_weak(word, word + 1,
                                           std::memory_order_acq_rel,
                                           std::memory_order_acquire));
    (*task_)(index);
    // The last completion takes the lock so the notify cannot slip between
    // the completion waiter's predicate check and its wait.
    if (pending_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
      std::lock_guard<std::mutex> lock(mutex_);
      finished_.notify_all();
    }
  }
}

}  // namespace stochkin
