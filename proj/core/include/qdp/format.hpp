#pragma once

#include <string>

namespace qdp {

/// Shortest round-trip decimal text for a double (std::to_chars), used for all
/// CSV/JSON data so seeded runs are byte-identical.
std::string format_real(double value);

}  // namespace qdp
