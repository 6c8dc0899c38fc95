#pragma once

#include <stdexcept>
#include <string>

namespace ecco {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonAntisymmetricBond : public Error {
public:
  using Error::Error;
};

class DanglingPort : public Error {
public:
  using Error::Error;
};

class DuplicateConnection : public Error {
public:
  using Error::Error;
};

class LengthMismatch : public Error {
public:
  using Error::Error;
};

class InsufficientHistory : public Error {
public:
  using Error::Error;
};

/// A subsimulator produced a non-finite state or output.
class SimulatorFailure : public Error {
public:
  using Error::Error;
};

class NonFiniteIndicator : public Error {
public:
  using Error::Error;
};

class TimeRangeMismatch : public Error {
public:
  using Error::Error;
};

class NoOnsetInRange : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace ecco
