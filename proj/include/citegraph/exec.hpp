#pragma once

namespace citegraph {

/// Selects between the OpenMP kernel and its serial reference. Both paths
/// produce bit-identical results; the serial one is kept for testing and
/// benchmarking.
enum class Exec { serial, parallel };

/// Number of OpenMP threads the parallel kernels will use.
int max_threads();

/// Caps the OpenMP thread count; n <= 0 leaves the runtime default.
void set_max_threads(int n);

}  // namespace citegraph
