#pragma once

namespace dpbench {

// Kernels come in two flavours: an OpenMP version and the plain serial loop it
// was derived from. The serial path is the reference the tests and the
// benchmark compare against; both must produce bit-identical output.
enum class Exec { Serial, Parallel };

}  // namespace dpbench
