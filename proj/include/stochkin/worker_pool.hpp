#ifndef STOCHKIN_WORKER_POOL_HPP
#define STOCHKIN_WORKER_POOL_HPP

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace stochkin {

/// Persistent pool of worker threads executing indexed batch jobs. Tasks are
/// claimed in index order via an atomic counter, so task code may rely on
/// claim order but never on completion order.
///
/// Jobs here arrive back to back (one per rejection-sampling batch), so
/// workers spin briefly for the next job before blocking; on sandboxed
/// kernels a futex round-trip costs more than a whole batch.
class WorkerPool {
 public:
  /// thread_count is the logical width; the number of OS threads spawned is
  /// capped at the hardware concurrency (the calling thread participates in
  /// every job and counts toward the cap).
  explicit WorkerPool(unsigned thread_count);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  /// Runs task(i) for every i in [0, count), blocking until all complete.
  /// A pool of width <= 1 degenerates to a serial loop. count must be < 2^32.
  void run(std::uint64_t count, const std::function<void(std::uint64_t)>& task);

 private:
  void worker_loop();
  void work_through_job(std::uint32_t generation);

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable finished_;

  // Claim word packs (generation << 32 | next index); a claim whose
  // generation does not match the claimer's is stale and is dropped, which
  // keeps workers that linger past a job's end from touching the next one.
  std::atomic<std::uint64_t> claim_{0};
  const std::function<void(std::uint64_t)>* task_ = nullptr;
  std::uint64_t task_count_ = 0;
  std::atomic<std::uint64_t> pending_{0};  // tasks not yet finished
  std::atomic<bool> stopping_{false};
  std::uint32_t generation_ = 0;  // mirrored in claim_'s upper half
};

}  // namespace stochkin

#endif
