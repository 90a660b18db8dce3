#pragma once

#include <complex>
#include <iostream>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace music2d {

using Index = Eigen::Index;

template <typename Scalar> using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar> using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar> using Mat2X = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;
template <typename Scalar> using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar> using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar> using VectorXC = VectorX<std::complex<Scalar>>;
template <typename Scalar> using MatrixXC = MatrixX<std::complex<Scalar>>;

using Vec2d = Vec2<double>;
using Mat2d = Mat2<double>;

// Degenerate geometry: zero-length curves, coincident polyline vertices, ...
struct InvalidGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scene-document rejection; carries the offending key when one is known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& message) : std::runtime_error(message) {}
  ParseError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Soft diagnostics (closed-form validity bounds, separation checks); never fatal.
inline void warn(const std::string& message) {
  std::cerr << "music2d: warning: " << message << "\n";
}

}  // namespace music2d
