#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace semeval {

/// Entry point of the `semeval` tool. Returns 0 on success, 1 on data errors
/// (one `semeval: error: <category>: <message>` line on `err`) and 2 on usage
/// errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace semeval
