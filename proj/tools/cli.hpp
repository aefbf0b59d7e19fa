#pragma once

#include "varpoint/experiments.hpp"

namespace varpoint {

/// The varpoint command line. Hooks replace the sequence kernels used by `verify`.
int run_cli(int argc, char** argv, const VerifyHooks& hooks = {});

}  // namespace varpoint
