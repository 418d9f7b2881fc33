#pragma once

#include <cmath>

namespace robin
{

// Point or displacement in the plane.
struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 &operator+=(const Vec2 &o)
  {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2 &operator-=(const Vec2 &o)
  {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2 &operator*=(double s)
  {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec2 &, const Vec2 &) = default;
};

constexpr Vec2 operator+(Vec2 a, const Vec2 &b)
{
  return a += b;
}
constexpr Vec2 operator-(Vec2 a, const Vec2 &b)
{
  return a -= b;
}
constexpr Vec2 operator-(const Vec2 &a)
{
  return {-a.x, -a.y};
}
constexpr Vec2 operator*(double s, Vec2 a)
{
  return a *= s;
}
constexpr Vec2 operator*(Vec2 a, double s)
{
  return a *= s;
}
constexpr double dot(const Vec2 &a, const Vec2 &b)
{
  return a.x * b.x + a.y * b.y;
}
// z-component of the 3D cross product.
constexpr double cross(const Vec2 &a, const Vec2 &b)
{
  return a.x * b.y - a.y * b.x;
}
inline double norm(const Vec2 &a)
{
  return std::hypot(a.x, a.y);
}
constexpr double norm2(const Vec2 &a)
{
  return dot(a, a);
}

}  // namespace robin
