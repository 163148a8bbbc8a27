#pragma once

#include <cstddef>
#include <functional>

namespace lmms {

/// Worker count: LMMS_THREADS when set (minimum 1), otherwise the hardware concurrency.
std::size_t thread_budget();

/// Forces serial execution process-wide (the CLI's --deterministic flag).
void set_serial(bool serial) noexcept;
bool serial() noexcept;

/// Runs fn(i) for i in [0, n). Work is split into contiguous blocks so each
/// index is handled by exactly one worker; fn must not touch shared mutable state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lmms
