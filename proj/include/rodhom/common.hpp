#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace rodhom {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<double>;
using CSpMat = Eigen::SparseMatrix<cplx>;
using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using CVec4 = Eigen::Vector4cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;
using Mat4 = Eigen::Matrix4d;
using CMat4 = Eigen::Matrix4cd;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr cplx I_unit{0.0, 1.0};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidArgument : Error {
    using Error::Error;
};
struct SingularSystem : Error {
    using Error::Error;
};
struct IncompatibleLoad : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct PairingMismatch : Error {
    using Error::Error;
};
struct AlignmentError : Error {
    using Error::Error;
};
struct ContourTooClose : Error {
    using Error::Error;
};

}  // namespace rodhom

#include <cstdint>
#include <cstdio>

namespace rodhom {

inline void fnv1a_feed(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
}

inline std::string fnv1a_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;

}  // namespace rodhom
