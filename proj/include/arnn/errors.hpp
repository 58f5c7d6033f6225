#ifndef ARNN_ERRORS_HPP
#define ARNN_ERRORS_HPP

#include <stdexcept>

namespace arnn {

/// A state or intermediate stage became non-finite.
class IntegrationDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The tuning inequalities admit no solution for the given constants.
class InfeasibleTuning : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arnn

#endif  // ARNN_ERRORS_HPP
