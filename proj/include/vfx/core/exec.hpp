#pragma once

namespace vfx {

/// Selects the OpenMP kernel or its serial twin. The serial path is kept as
/// the reference the parallel path is tested and benchmarked against.
enum class Exec { serial, parallel };

}  // namespace vfx
