#pragma once

#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace kkb {

inline constexpr const char* version = "0.1.0";

/// Input failed structural validation (dimensions, label ranges, flag values).
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be read, written or parsed.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data admits no meaningful numerical answer (e.g. zero median distance).
class degenerate_data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename... Parts>
std::string str(Parts&&... parts) {
  std::ostringstream out;
  (out << ... << parts);
  return out.str();
}

}  // namespace detail

/// Runs fn(i) for every i in [begin, end), split into contiguous chunks over
/// at most `threads` workers. fn must only write state owned by index i; with
/// that contract the result is identical for any thread count.
inline void parallel_for(int begin, int end, int threads, const std::function<void(int)>& fn) {
  const int count = end - begin;
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = begin + w * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace kkb
