#pragma once

namespace lbpopt {

// Selects between the OpenMP kernel and its serial reference. Every parallel
// kernel in this library partitions work so that each output element is
// produced by exactly one thread with a fixed summation order, so both
// policies give bit-identical results.
enum class Exec { serial, parallel };

// Number of OpenMP threads available to parallel kernels (1 without OpenMP).
int max_threads();

// Overrides the OpenMP thread count; n <= 0 restores the runtime default.
void set_threads(int n);

}  // namespace lbpopt
