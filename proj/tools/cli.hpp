#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hyperobs::cli {

// Entry point shared by the binary and the tests. Returns the process exit
// code: 0 success, 1 analysis failure (aborted/inconclusive chain, failed
// design, simulation blow-up), 2 usage or input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperobs::cli
