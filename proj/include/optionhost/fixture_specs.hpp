#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "optionhost/argdoc.hpp"

// Option declarations for the repository's fixture programs. The programs
// that parse options use these directly; `optionhost emit` prints them.
namespace optionhost::fixtures {

argdoc::ArgSpec argv_echo();
argdoc::ArgSpec seeded_output();
argdoc::ArgSpec write_file();

std::vector<std::string> names();
// Throws Error(UnknownOption) for a name not in names().
argdoc::ArgSpec by_name(std::string_view name);

}  // namespace optionhost::fixtures
