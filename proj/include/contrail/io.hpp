// Copyright 2026 The Contrail Explorer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>

namespace contrail {

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename so readers never see a partial file.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);
void append_double(std::string& out, double v);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace contrail
