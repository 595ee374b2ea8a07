#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

#include "overbook/random.hpp"

namespace overbook {

// Runs `trials` independent trials and returns their results indexed by trial.
//
// Trial t always receives Rng(derive_seed(master_seed, t)), so the returned
// vector is identical for every worker count and schedule. Each worker owns a
// private copy of `fn`; mutable lambdas may keep scratch buffers.
template <class Fn>
auto run_trials(std::size_t trials, std::uint64_t master_seed, unsigned jobs,
                const Fn& fn) {
  using Result = std::invoke_result_t<Fn&, std::size_t, Rng&>;
  std::vector<Result> results(trials);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(
                                                   std::max<std::size_t>(trials, 1))));

  auto work = [&](std::size_t begin, std::size_t end) {
    Fn local = fn;
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng = trial_rng(master_seed, t);
      results[t] = local(t, rng);
    }
  };

  if (jobs == 1) {
    work(0, trials);
    return results;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  const std::size_t chunk = (trials + jobs - 1) / jobs;
  for (unsigned w = 0; w < jobs; ++w) {
    const std::size_t begin = std::min(trials, w * chunk);
    const std::size_t end = std::min(trials, begin + chunk);
    workers.emplace_back([&, begin, end] {
      try {
        work(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace overbook
