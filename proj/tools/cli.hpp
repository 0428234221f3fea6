#pragma once

#include <iosfwd>

namespace mscale {

/// Runs the mscale command line. Returns 0 on success, 1 on a library error
/// (after printing `error: code=<code> message="..."` to err) and 2 on a
/// usage error.
int cli_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mscale
