#pragma once

#include <iosfwd>

namespace pelastica {

// Exit status: 0 ok, 1 verification failure or numerical breakdown,
// 2 usage error, 3 domain error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pelastica
