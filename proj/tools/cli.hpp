#pragma once

#include <iosfwd>

namespace qdcca {

/// Entry point of the qdcca executable; returns the process exit status.
/// Errors are written to `err` as one JSON object per line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdcca
