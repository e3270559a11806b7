#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dagscore::cli {

/// Runs one command line (args exclude the program name). Reports go to the
/// --out file when given, else to `out`; diagnostics go to `err`.
/// Returns 0 on success, 1 on validation errors, 2 on I/O errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dagscore::cli
