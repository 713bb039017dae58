#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace narrex::cli {

enum ExitStatus : int {
  kOk = 0,
  kUsage = 1,
  kInvalid = 2,
  kReasoning = 3,
  kScript = 4,
};

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  bool color = false;
};

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, Streams streams);

}  // namespace narrex::cli
