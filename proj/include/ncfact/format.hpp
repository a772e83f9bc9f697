// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef NCFACT_FORMAT_HPP
#define NCFACT_FORMAT_HPP

#include <charconv>
#include <string>

namespace ncfact {

/// Locale-independent decimal formatting with 17 significant digits, enough
/// for exact double round trips in CSV and CLI output.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace ncfact

#endif  // NCFACT_FORMAT_HPP
