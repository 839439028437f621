#ifndef DURATELESS_ERRORS_HPP
#define DURATELESS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace durateless {

/** Base class for all validation failures raised by this library. */
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/** A weight vector contains no strictly positive entry. */
class AllZeroError : public ValidationError {
public:
  explicit AllZeroError(const std::string& what) : ValidationError(what) {}
};

/** A weight vector contains a negative entry. */
class NegativeWeightError : public ValidationError {
public:
  explicit NegativeWeightError(const std::string& what) : ValidationError(what) {}
};

/** A weight vector contains NaN or infinity. */
class NonFiniteError : public ValidationError {
public:
  explicit NonFiniteError(const std::string& what) : ValidationError(what) {}
};

/** A numeric parameter is outside its admissible range. */
class InvalidParameterError : public ValidationError {
public:
  explicit InvalidParameterError(const std::string& what) : ValidationError(what) {}
};

/** A degree distribution's maximum degree exceeds the block length it encodes. */
class DegreeExceedsBlockError : public ValidationError {
public:
  explicit DegreeExceedsBlockError(const std::string& what) : ValidationError(what) {}
};

/** Selection was requested from an empty Pareto front. */
class EmptyFrontError : public ValidationError {
public:
  explicit EmptyFrontError(const std::string& what) : ValidationError(what) {}
};

/** File or stream I/O failed. */
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace durateless

#endif
