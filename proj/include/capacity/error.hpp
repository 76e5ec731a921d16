#ifndef CAPACITY_ERROR_HPP
#define CAPACITY_ERROR_HPP

#include <stdexcept>
#include <string>

namespace capacity
{

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: bad geometry, bad schedule, out-of-domain arguments.
class InputError : public Error
{
public:
    using Error::Error;
};

/// A computation failed (factorization, quadrature, solve).
class NumericalError : public Error
{
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration file or command line.
class ConfigError : public InputError
{
public:
    using InputError::InputError;
};

class OverlapError : public InputError
{
public:
    using InputError::InputError;
};

class DegenerateShapeError : public InputError
{
public:
    using InputError::InputError;
};

class ZeroScaleError : public InputError
{
public:
    using InputError::InputError;
};

class DomainError : public InputError
{
public:
    using InputError::InputError;
};

class DuplicateCenterError : public InputError
{
public:
    using InputError::InputError;
};

class SplitError : public InputError
{
public:
    using InputError::InputError;
};

class PreconditionError : public InputError
{
public:
    using InputError::InputError;
};

class ScheduleError : public InputError
{
public:
    using InputError::InputError;
};

class PoleEvaluationError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

class BranchCutError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

class NonRationalBasisError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

class PoleOnContourError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

class MaxDepthError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

class SingularGramError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

class SolveError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

} // namespace capacity

#endif
