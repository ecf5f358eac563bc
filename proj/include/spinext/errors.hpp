#pragma once

#include <stdexcept>
#include <string>

namespace spinext {

// Raised when a request exceeds the dense/combinatorial capacity limits
// (e.g. dense operators beyond 6 modes). Everything else maps onto
// std::invalid_argument / std::out_of_range.
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spinext
