#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ihf {

inline constexpr int kMaxDim = 3;

// Physical coordinates; unused trailing components are zero.
using Point = std::array<double, kMaxDim>;
// Integer lattice coordinates; node position is spacing * lattice.
using Lattice = std::array<int, kMaxDim>;

inline double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Point& p) { return std::sqrt(dot(p, p)); }

inline double distance(const Point& a, const Point& b) {
  const Point d{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
  return norm(d);
}

inline int max_abs(const Lattice& l) {
  return std::max({std::abs(l[0]), std::abs(l[1]), std::abs(l[2])});
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ObstacleTooLarge : public Error {
 public:
  using Error::Error;
};

class EmptyInterior : public Error {
 public:
  using Error::Error;
};

class RadiusOutOfDomain : public Error {
 public:
  using Error::Error;
};

class EnvelopeViolation : public Error {
 public:
  using Error::Error;
};

class ProfileMismatch : public Error {
 public:
  using Error::Error;
};

class AsymmetricDomain : public Error {
 public:
  using Error::Error;
};

}  // namespace ihf
