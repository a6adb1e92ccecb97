#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chaf::cli {

// Runs one CLI invocation. Exit status: 0 success (or input accepted),
// 1 input rejected by the parse, 2 usage or grammar error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chaf::cli
