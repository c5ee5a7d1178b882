#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bala {

/// Subcommands generate / solve / bench / verify. Returns 0 on success, 2
/// when verify finds a tolerance violation, 1 on any error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace bala
