#pragma once

#include <string>

namespace mfe {

// Shortest round-trip decimal form of a double ("nan", "inf", "-inf" for
// non-finite values). Used for every CSV and text output so files are
// byte-reproducible.
std::string format_real(double v);

}  // namespace mfe
