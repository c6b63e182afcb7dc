#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sfpinn {

// Persistent worker pool. run() dispatches job indices 0..njobs-1 to idle
// workers (plus the calling thread) and blocks until all complete. Jobs must
// write to disjoint storage; the pool itself imposes no ordering.
class ThreadPool {
 public:
  explicit ThreadPool(int threads) {
    const int extra = threads > 1 ? threads - 1 : 0;
    workers_.reserve(extra);
    for (int i = 0; i < extra; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  ~ThreadPool() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

  int size() const { return static_cast<int>(workers_.size()) + 1; }

  void run(int njobs, const std::function<void(int)>& job) {
    if (njobs <= 0) return;
    if (workers_.empty()) {
      for (int i = 0; i < njobs; ++i) job(i);
      return;
    }
    int local_njobs;
    {
      std::lock_guard<std::mutex> lk(mu_);
      job_ = &job;
      njobs_ = local_njobs = njobs;
      next_.store(0, std::memory_order_relaxed);
      inside_ = 1;  // the calling thread
      ++generation_;
    }
    cv_.notify_all();
    drain(job, local_njobs);
    std::unique_lock<std::mutex> lk(mu_);
    --inside_;
    done_cv_.wait(lk, [this] { return inside_ == 0; });
    job_ = nullptr;
  }

  static int hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
  }

 private:
  void drain(const std::function<void(int)>& job, int njobs) {
    int idx;
    while ((idx = next_.fetch_add(1, std::memory_order_relaxed)) < njobs) job(idx);
  }

  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)>* job = nullptr;
      int njobs = 0;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        if (job_ == nullptr) continue;  // task already finished without us
        job = job_;
        njobs = njobs_;
        ++inside_;
      }
      drain(*job, njobs);
      {
        std::lock_guard<std::mutex> lk(mu_);
        if (--inside_ == 0) done_cv_.notify_all();
      }
    }
  }

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* job_ = nullptr;
  std::atomic<int> next_{0};
  int njobs_ = 0;
  int inside_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace sfpinn
