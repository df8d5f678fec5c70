#ifndef JETFLOW_ERRORS_HPP
#define JETFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace jetflow {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation left the domain of an expression: log/sqrt of a negative
// argument, division by zero, or a non-finite intermediate value.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// Expression text could not be parsed; carries 1-based line/column.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line),
          column(column) {}
    int line;
    int column;
};

// A symbol outside the chart's variable set (e.g. v3 when dim = 2).
class UnknownSymbol : public Error {
public:
    explicit UnknownSymbol(const std::string& what) : Error(what) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class SingularJacobian : public Error {
public:
    explicit SingularJacobian(const std::string& what) : Error(what) {}
};

class SingularMetric : public Error {
public:
    explicit SingularMetric(const std::string& what) : Error(what) {}
};

class SingularMass : public Error {
public:
    explicit SingularMass(const std::string& what) : Error(what) {}
};

class NotAffine : public Error {
public:
    explicit NotAffine(const std::string& what) : Error(what) {}
};

class ChartNotAdapted : public Error {
public:
    explicit ChartNotAdapted(const std::string& what) : Error(what) {}
};

class TrajectoryMismatch : public Error {
public:
    explicit TrajectoryMismatch(const std::string& what) : Error(what) {}
};

class NoOverlap : public Error {
public:
    explicit NoOverlap(const std::string& what) : Error(what) {}
};

class NoHyperboloidPoint : public Error {
public:
    explicit NoHyperboloidPoint(const std::string& what) : Error(what) {}
};

}  // namespace jetflow

#endif
