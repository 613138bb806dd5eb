#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fspec {

/// Command-line driver. Exit codes: 0 success, 1 a check found a violation,
/// 2 lex/parse/type/constant-resolution error, 3 usage error.
int cliMain(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fspec
