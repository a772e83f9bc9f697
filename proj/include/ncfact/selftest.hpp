// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef NCFACT_SELFTEST_HPP
#define NCFACT_SELFTEST_HPP

#include <ostream>

namespace ncfact {

/// Runs the desk-scale invariant suite for every module, printing one line
/// per suite. Returns the number of failed suites. Output is deterministic
/// and independent of the thread count.
int selftest(int threads, std::ostream& out);

}  // namespace ncfact

#endif  // NCFACT_SELFTEST_HPP
