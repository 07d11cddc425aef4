#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace mla::cli {

/// Runs one command. `args` excludes the program name.
/// Returns 0 on success, 1 on validation errors, 2 on runtime errors.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace mla::cli
