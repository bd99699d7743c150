#pragma once

namespace mudflow {

/// Execution mode for the data-parallel kernels. Every kernel has a serial
/// reference implementation and an OpenMP one; both compute each output
/// element independently with identical arithmetic, so results are
/// bitwise equal across modes and thread counts.
enum class ExecMode { Serial, OpenMP };

struct ExecPolicy {
    ExecMode mode = ExecMode::Serial;
    int threads = 0; ///< 0 = OpenMP runtime default

    static ExecPolicy serial() { return {ExecMode::Serial, 0}; }
    static ExecPolicy openmp(int threads = 0) { return {ExecMode::OpenMP, threads}; }
};

/// Number of threads an OpenMP kernel will actually use under `policy`.
int resolved_threads(const ExecPolicy& policy);

} // namespace mudflow
