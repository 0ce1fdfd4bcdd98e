// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace contrail::cli {

/// Exit codes: 0 success, 1 failure (one JSON error line on `err`), 2 usage.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace contrail::cli
