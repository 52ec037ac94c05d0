#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace mkdvlab {

struct SampleFailure {
  std::size_t index = 0;
  std::string message;
};

template <class T>
struct EnsembleResults {
  std::vector<std::optional<T>> values;  // by sample index; empty where the task threw
  std::vector<SampleFailure> failures;   // sorted by index

  std::size_t completed() const { return values.size() - failures.size(); }
};

/// Runs task(i) for i in [0, count) on a fixed pool of workers. Work is handed out by index
/// and results are stored by index, so the output does not depend on the worker count.
/// An exception thrown by one task is recorded against its index and does not stop the others.
template <class T>
EnsembleResults<T> ensemble_map(std::size_t count, const std::function<T(std::size_t)>& task, int workers) {
  if (workers < 1) throw std::invalid_argument("ensemble_map: workers must be >= 1");
  EnsembleResults<T> out;
  out.values.resize(count);
  std::vector<std::optional<std::string>> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out.values[i] = task(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      } catch (...) {
        errors[i] = "unknown exception";
      }
    }
  };
  const auto n = static_cast<std::size_t>(workers);
  if (n == 1 || count < 2) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < std::min(n, count); ++k) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < count; ++i)
    if (errors[i]) out.failures.push_back({i, *errors[i]});
  return out;
}

}  // namespace mkdvlab
