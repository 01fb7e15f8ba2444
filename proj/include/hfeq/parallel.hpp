#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace hfeq::parallel {

// Worker count used by for_each_index. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Calls body(i) for i in [0, n). Indices are split into contiguous static
// chunks, so any per-index result is independent of the thread count as long
// as body(i) only writes slot i.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hfeq::parallel
