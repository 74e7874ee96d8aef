#pragma once

#include <string>
#include <vector>

namespace lrdseq {

// Exit codes: 0 success, 2 config error, 3 precondition violation
// (rank condition, covariance not positive definite, size caps),
// 4 numeric non-convergence, 1 anything else.
int run_cli(const std::vector<std::string>& args);

} // namespace lrdseq
