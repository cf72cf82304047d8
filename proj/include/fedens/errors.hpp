#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fedens {

//! Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! A point coordinate lies outside the grid (or distribution support).
class OutOfDomain : public Error
{
public:
  OutOfDomain(std::int64_t axis, double value)
    : OutOfDomain(axis, value, "point coordinate " + std::to_string(value) +
                                 " on axis " + std::to_string(axis) +
                                 " lies outside the domain")
  {}

  std::int64_t axis() const { return axis_; }
  double value() const { return value_; }

protected:
  OutOfDomain(std::int64_t axis, double value, const std::string& what)
    : Error(what)
    , axis_(axis)
    , value_(value)
  {}

private:
  std::int64_t axis_;
  double value_;
};

//! Like OutOfDomain, but names the (0-based) position of the offending
//! sample in the input list.
class SampleOutOfDomain : public OutOfDomain
{
public:
  SampleOutOfDomain(std::int64_t index, std::int64_t axis, double value)
    : OutOfDomain(axis, value,
                  "sample " + std::to_string(index) + " has coordinate " +
                    std::to_string(value) + " on axis " +
                    std::to_string(axis) + " outside the domain")
    , index_(index)
  {}

  std::int64_t index() const { return index_; }

private:
  std::int64_t index_;
};

class IndexOutOfRange : public Error
{
public:
  using Error::Error;
};

class EmptySampleSet : public Error
{
public:
  EmptySampleSet()
    : Error("sample set is empty")
  {}
};

class NonpositiveBandwidth : public Error
{
public:
  explicit NonpositiveBandwidth(double b)
    : Error("bandwidth must be positive, got " + std::to_string(b))
  {}
};

class UnsupportedOrder : public Error
{
public:
  explicit UnsupportedOrder(int r)
    : Error("coupling order r=" + std::to_string(r) +
            " is unsupported (only r=1 and r=2 give N_delta > 1)")
  {}
};

class DegenerateSupport : public Error
{
public:
  explicit DegenerateSupport(std::int64_t axis)
    : Error("sample extremes coincide on axis " + std::to_string(axis))
    , axis_(axis)
  {}

  std::int64_t axis() const { return axis_; }

private:
  std::int64_t axis_;
};

class NonpositiveValue : public Error
{
public:
  using Error::Error;
};

class TooFewPoints : public Error
{
public:
  using Error::Error;
};

//! Malformed input file. line() is 1-based.
class ParseError : public Error
{
public:
  ParseError(std::int64_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what)
    , line_(line)
  {}

  std::int64_t line() const { return line_; }

private:
  std::int64_t line_;
};

} // namespace fedens
