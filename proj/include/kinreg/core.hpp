#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinreg {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3T = Eigen::Matrix<Scalar, 3, 3>;

using Vec3 = Vec3T<double>;
using Mat3 = Mat3T<double>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using RowMatX = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid caller input: non-positive sizes, malformed vectors, unknown names.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// A point that must lie in a domain (or on its boundary) does not.
class DomainError : public Error {
public:
    using Error::Error;
};

// A parameter outside the range a routine supports.
class RangeError : public Error {
public:
    using Error::Error;
};

// A numerical sub-step could not reach its target accuracy.
class ResolutionError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

private:
    std::vector<double> history_;
};

class ConfigError : public Error {
public:
    ConfigError(int line, const std::string& what)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

inline void require(bool ok, const char* msg) {
    if (!ok) throw ArgumentError(msg);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

// Unit vector orthogonal to n, chosen continuously away from the poles of the
// least aligned coordinate axis.
inline Vec3 any_orthogonal(const Vec3& n) {
    Vec3 a = std::abs(n.x()) < 0.6 ? Vec3::UnitX() : (std::abs(n.y()) < 0.6 ? Vec3::UnitY() : Vec3::UnitZ());
    Vec3 t = a - a.dot(n) * n;
    return t.normalized();
}

inline void orthonormal_frame(const Vec3& n, Vec3& t1, Vec3& t2) {
    t1 = any_orthogonal(n);
    t2 = n.cross(t1);
}

}  // namespace kinreg
