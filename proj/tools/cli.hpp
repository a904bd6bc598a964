#pragma once

#include <string>
#include <vector>

namespace hwm::cli {

// Exit codes: 0 ok, 1 input error, 2 non-convergence, 3 dynamical event,
// 4 verification failure.
int run(std::vector<std::string> args);

}  // namespace hwm::cli
