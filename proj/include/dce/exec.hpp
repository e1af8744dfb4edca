#pragma once

namespace dce {

// Kernels with data-parallel inner loops take a policy: Serial is the
// reference implementation, Parallel distributes across OpenMP threads.
// Both produce bit-identical results (independent slots, fixed-order
// reductions), so tests compare them exactly.
enum class ExecutionPolicy { Serial, Parallel };

} // namespace dce
