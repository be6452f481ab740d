#pragma once

#include <stdexcept>
#include <string>

namespace optoresponse
{

// Base of every failure raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error
{
public:
  using Error::Error;
};

// Drift matrix has an eigenvalue with nonnegative real part.
class Unstable : public Error
{
public:
  using Error::Error;
};

// Mean-field equations have no real root with a stable drift matrix.
class NoStableRoot : public Error
{
public:
  using Error::Error;
};

// Negative radicand in the normal-mode formula (parametric instability).
class ImaginaryMode : public Error
{
public:
  using Error::Error;
};

class NoRoot : public Error
{
public:
  using Error::Error;
};

// Vectorized Lyapunov system is singular (marginal stability).
class Singular : public Error
{
public:
  using Error::Error;
};

class SingularAt : public Error
{
public:
  SingularAt(double omega, const std::string &what) : Error(what), omega_(omega) {}
  double omega() const { return omega_; }

private:
  double omega_;
};

class GridTooCoarse : public Error
{
public:
  using Error::Error;
};

class GridTooNarrow : public Error
{
public:
  using Error::Error;
};

class CutoffTooSmall : public Error
{
public:
  using Error::Error;
};

class NonUniqueSteadyState : public Error
{
public:
  using Error::Error;
};

class WindowBias : public Error
{
public:
  using Error::Error;
};

}  // namespace optoresponse
