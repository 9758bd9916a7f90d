#pragma once

namespace ip {

// Caps the worker pool used by the OpenMP kernels. 0 restores the default
// (all hardware threads). Results are identical for every setting; only the
// wall time changes.
void set_num_threads(int n);
int num_threads();

}  // namespace ip
