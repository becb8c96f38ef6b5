#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvflow {

/// Raised when a curvature vector leaves the Garding cone an operation needs.
/// `node()` is the grid node where it happened, or npos for pointwise calls.
class ConeViolation : public std::domain_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit ConeViolation(const std::string& what, std::size_t node = npos)
      : std::domain_error(what), node_(node) {}

  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

/// Grid or profile that fails its structural invariants.
class InvalidProfile : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dual support function whose W = Hess(u) + u Id is not positive definite.
class ConvexityLoss : public std::domain_error {
 public:
  explicit ConvexityLoss(const std::string& what, std::size_t node)
      : std::domain_error(what), node_(node) {}

  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

}  // namespace curvflow
