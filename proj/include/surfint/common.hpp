#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace surfint {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

// Which side of the interaction support a point or a degree of freedom lives on.
enum class Side { Omega1, Omega2, OnInterface };

inline const char* to_string(Side s) {
  switch (s) {
    case Side::Omega1: return "Omega1";
    case Side::Omega2: return "Omega2";
    case Side::OnInterface: return "OnInterface";
  }
  return "?";
}

// All library failures derive from Error; the message is prefixed with the
// module that raised it ("geometry: theta must lie in (0, pi/2)").
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what) {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class MeshError : public Error {
 public:
  explicit MeshError(const std::string& what) : Error("meshing", what) {}
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace surfint
