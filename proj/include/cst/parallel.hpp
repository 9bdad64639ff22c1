#pragma once

#include <cstddef>
#include <functional>

namespace cst {

// Default worker count: logical cores, at least one.
unsigned default_jobs();

// Runs body(i) for i in [0, n) on up to `jobs` threads. Every index runs
// even if some throw; afterwards the exception of the lowest failing index
// is rethrown.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace cst
