#pragma once

#include <iosfwd>

namespace fedens::cli {

//! Runs the fedens command line. Returns the process exit code: 0 on
//! success, 2 on usage errors, 1 on runtime or data errors. Error messages
//! go to `err` prefixed with "error:".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fedens::cli
