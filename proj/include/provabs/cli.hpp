// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace provabs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Entry point of the `provabs` tool: gen | compress | eval | compare | serve.
/// Returns 0 on success, 1 on validation errors, 2 on I/O errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace provabs
