#pragma once

#include <iosfwd>

namespace qsn {

/// Exit codes: 0 success, 1 validation error, 2 reproduction check failed,
/// 64 usage error (help is printed).
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace qsn
