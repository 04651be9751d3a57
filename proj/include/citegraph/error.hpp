#pragma once

#include <stdexcept>
#include <string>

namespace citegraph {

/// Raised for problems with input data: malformed files, unknown ids,
/// invariant violations in loaded records. The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace citegraph
