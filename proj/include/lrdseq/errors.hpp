#pragma once

#include <stdexcept>
#include <string>

namespace lrdseq {

// Base class for everything this library throws on a contract violation.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexOutOfRange : public Error { public: using Error::Error; };
class OrderTooLarge : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class NotUnitNorm : public Error { public: using Error::Error; };
class QuadratureNotConverged : public Error { public: using Error::Error; };
class SizeCapExceeded : public Error { public: using Error::Error; };
class GridMismatch : public Error { public: using Error::Error; };
class MissingCoefficient : public Error { public: using Error::Error; };
class CapExceeded : public Error { public: using Error::Error; };
class DominationViolated : public Error { public: using Error::Error; };

// Covariance assembly found an inadmissible (c_ij, D, L) combination.
// Reports the smallest Cholesky/LDLT pivot seen so the caller can tell
// "barely indefinite" from "wildly wrong".
class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(const std::string& msg, double smallest_pivot)
        : Error(msg), smallest_pivot(smallest_pivot) {}
    double smallest_pivot;
};

// Experiment precondition D < 1/m failed.
class RankConditionViolated : public Error { public: using Error::Error; };

// Configuration file problems; message names the offending field.
class ConfigError : public Error { public: using Error::Error; };

} // namespace lrdseq
