#pragma once

#include <iosfwd>

namespace spre {

// Exit codes: 0 success, 1 configuration error, 2 runtime failure.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spre
