// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace ics {

// Error categories aligned with the CLI exit codes:
// UsageError -> 1, DataError -> 2, TrainingError -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid arguments, configuration values or preconditions.
struct UsageError : Error {
  using Error::Error;
};

// Malformed files, shape mismatches, inconsistent datasets.
struct DataError : Error {
  using Error::Error;
};

// Training or selection could not produce a result.
struct TrainingError : Error {
  using Error::Error;
};

}  // namespace ics
