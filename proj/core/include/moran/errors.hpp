#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace moran {

// Root of every error raised by the library. Callers that only need to
// distinguish "bad input" from "bug" can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
public:
    SingularMatrix() : Error("matrix is singular") {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SizeMismatch : public Error {
public:
    using Error::Error;
};

// Digit set or prime outside the model class (#D = m, m prime).
class ModelViolation : public Error {
public:
    using Error::Error;
};

class CongruenceViolation : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class HypothesisViolation : public Error {
public:
    using Error::Error;
};

class TemplateMismatch : public Error {
public:
    using Error::Error;
};

class DeterminantViolation : public Error {
public:
    using Error::Error;
};

class CapExceeded : public Error {
public:
    using Error::Error;
};

class IoFailure : public Error {
public:
    using Error::Error;
};

class NoAdmissibleDirection : public Error {
public:
    explicit NoAdmissibleDirection(std::size_t level)
        : Error("no admissible zero direction at level " + std::to_string(level)), level_(level) {}
    std::size_t level() const noexcept { return level_; }

private:
    std::size_t level_;
};

class PairVerificationFailed : public Error {
public:
    PairVerificationFailed(std::size_t block, const std::string& witness)
        : Error("block " + std::to_string(block) + " failed compatible-pair verification: " + witness),
          block_(block) {}
    std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

class CollisionDetected : public Error {
public:
    using Error::Error;
};

class ContainmentViolation : public Error {
public:
    using Error::Error;
};

}  // namespace moran
