#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace zeno::cli {

// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zeno::cli
