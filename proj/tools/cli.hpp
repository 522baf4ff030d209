#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brcf {

/// Entry point of the command-line tool. Returns the process exit code; usage errors give 2.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace brcf
