#pragma once

#include <iosfwd>

namespace yt8m {

/// Entry point of the `yt8m` tool. Returns 0 on success, 1 on a validation
/// or usage error, 2 on an I/O error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace yt8m
