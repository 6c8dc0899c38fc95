#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ecco {

/// Persistent worker pool running one batch of indexed tasks at a time.
/// run() blocks until every task of the batch has finished.
class ForkJoinPool {
public:
  explicit ForkJoinPool(std::size_t workers) {
    threads_.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) {
      threads_.emplace_back([this] { worker_loop(); });
    }
  }

  ForkJoinPool(const ForkJoinPool&) = delete;
  ForkJoinPool& operator=(const ForkJoinPool&) = delete;

  ~ForkJoinPool() {
    {
      std::lock_guard lock(mutex_);
      stop_ = true;
    }
    start_cv_.notify_all();
    for (auto& t : threads_) {
      t.join();
    }
  }

  [[nodiscard]] std::size_t size() const { return threads_.size(); }

  void run(std::size_t n_tasks, const std::function<void(std::size_t)>& task) {
    if (threads_.empty()) {
      for (std::size_t i = 0; i < n_tasks; ++i) task(i);
      return;
    }
    std::unique_lock lock(mutex_);
    task_ = &task;
    n_tasks_ = n_tasks;
    next_ = 0;
    remaining_ = n_tasks;
    error_ = nullptr;
    ++generation_;
    start_cv_.notify_all();
    done_cv_.wait(lock, [this] { return remaining_ == 0; });
    task_ = nullptr;
    if (error_) {
      std::rethrow_exception(error_);
    }
  }

private:
  void worker_loop() {
    std::size_t seen = 0;
    std::unique_lock lock(mutex_);
    for (;;) {
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      while (task_ != nullptr && next_ < n_tasks_) {
        const std::size_t i = next_++;
        const auto* task = task_;
        lock.unlock();
        std::exception_ptr err;
        try {
          (*task)(i);
        } catch (...) {
          err = std::current_exception();
        }
        lock.lock();
        if (err && !error_) error_ = err;
        if (--remaining_ == 0) done_cv_.notify_one();
      }
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::size_t n_tasks_ = 0;
  std::size_t next_ = 0;
  std::size_t remaining_ = 0;
  std::size_t generation_ = 0;
  std::exception_ptr error_;
  bool stop_ = false;
};

} // namespace ecco
