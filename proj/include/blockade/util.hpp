#pragma once

#include <functional>
#include <string>

namespace blockade {

// Non-fatal diagnostics (truncation weight, validity-range stretches) go
// through a process-wide sink so the CLI can escalate them and tests can
// capture them. Default sink prints "warning: ..." on stderr.
using WarningHandler = std::function<void(const std::string&)>;

void emit_warning(const std::string& message);
WarningHandler set_warning_handler(WarningHandler handler);

// Worker count for grid/scan parallelism: BLOCKADE_THREADS if set (clamped
// to >= 1), otherwise hardware concurrency.
int worker_thread_count();

// Runs body(i) for i in [0, count) on worker_thread_count() threads.
// Iterations must be independent; results should be written by index so
// output does not depend on scheduling.
void parallel_for(int count, const std::function<void(int)>& body);

// 17 significant digits, C locale: CSV cells round-trip exactly and the
// files are byte-identical across runs.
std::string format_double(double value);

}  // namespace blockade
