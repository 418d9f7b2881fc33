#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace robin
{

// Worker count: ROBIN_SPECTRA_THREADS when set to a positive integer,
// otherwise the hardware concurrency.
inline int max_threads()
{
  if (const char *env = std::getenv("ROBIN_SPECTRA_THREADS"))
  {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0)
    {
      return static_cast<int>(std::min<long>(v, 256));
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(0) ... f(n-1) on up to max_threads() threads. Results must be
// written by index so the outcome does not depend on scheduling. The
// exception of the lowest failing index is rethrown.
template <class F>
void parallel_for(std::size_t n, F &&f)
{
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(max_threads()));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      try
      {
        f(i);
      }
      catch (...)
      {
        errors[i] = std::current_exception();
      }
    }
  }
  else
  {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
    {
      pool.emplace_back(
          [&]
          {
            for (std::size_t i = next++; i < n; i = next++)
            {
              try
              {
                f(i);
              }
              catch (...)
              {
                errors[i] = std::current_exception();
              }
            }
          });
    }
    for (auto &t : pool)
    {
      t.join();
    }
  }
  for (auto &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace robin
