#pragma once

#include <stdexcept>
#include <string>

namespace dpusim {

/// A precondition of an operation was not met by the caller.
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// The unrolled program does not fit in IRAM; the DPU toolchain refuses to link it.
class IramOverflow : public std::runtime_error {
 public:
  explicit IramOverflow(const std::string& what) : std::runtime_error(what) {}
};

/// Not enough free ranks in the topology to satisfy a request.
class AllocationError : public std::runtime_error {
 public:
  explicit AllocationError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
inline void require(bool cond, const char* what) {
  if (!cond) throw ContractViolation(what);
}
}  // namespace detail

}  // namespace dpusim
