#pragma once

#include <cstddef>
#include <functional>

namespace persid {

/// Upper bound on worker threads. 0 restores the default, which is the
/// PERSID_THREADS environment variable when set, else hardware concurrency.
void set_thread_limit(unsigned limit);
unsigned thread_limit();

/// Runs body(i) for i in [0, count). Each index is handled by exactly one
/// worker; callers write results into pre-sized slots so the output order
/// never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace persid
