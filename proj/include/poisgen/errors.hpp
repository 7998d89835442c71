#pragma once

#include <stdexcept>
#include <string>

namespace poisgen {

/// Malformed or inconsistent input: bad file, mixed fields, wrong dimension,
/// unknown kind name. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Mathematically undefined request, e.g. inverting zero.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace poisgen
