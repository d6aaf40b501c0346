#pragma once

// Dimension-dependent exponents, bubble parameters and the error types shared
// by every module.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bubblelab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad dimension, bad parameter, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two operands live on different grids / dimensions / axes.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A field that must be strictly positive is not, or has non-finite samples.
class NonPositiveField : public Error {
 public:
  using Error::Error;
};

/// The discretisation does not resolve the input to the requested tolerance.
class Unresolved : public Error {
 public:
  using Error::Error;
};

/// Exact rational number with a positive denominator, always in lowest terms.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  friend bool operator==(Rational a, Rational b) = default;

  std::string str() const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Space dimension n >= 3 together with the critical exponents
///   p = (n+2)/(n-2),  2* = 2n/(n-2),  m = 1/p,  1/(1-m) = (n+2)/4,
/// and the conformal-Laplacian shift n(n-2)/4 of the round sphere.
class Dimension {
 public:
  explicit Dimension(int n);

  int n() const { return n_; }

  Rational p_exact() const { return p_; }
  Rational two_star_exact() const { return two_star_; }
  Rational m_exact() const { return m_; }
  Rational c_flow_exact() const { return c_flow_; }
  Rational sphere_shift_exact() const { return sphere_shift_; }

  double p() const { return p_.value(); }
  double two_star() const { return two_star_.value(); }
  double m() const { return m_.value(); }
  double c_flow() const { return c_flow_.value(); }
  double sphere_shift() const { return sphere_shift_.value(); }
  /// Dual exponent 2n/(n+2) of the deficit norm.
  double dual_exponent() const { return 2.0 * n_ / (n_ + 2.0); }

  /// |S^{k}| = 2 pi^{(k+1)/2} / Gamma((k+1)/2).
  static double sphere_area(int k);

  friend bool operator==(const Dimension& a, const Dimension& b) { return a.n_ == b.n_; }

 private:
  int n_;
  Rational p_, two_star_, m_, c_flow_, sphere_shift_;
};

Dimension make_dimension(int n);

/// Bubble v_kappa[z, lambda] scaled by an amplitude alpha:
///   alpha * lambda^{(n-2)/2} (n(n-2)/kappa)^{(n-2)/4} (1 + lambda^2 |x-z|^2)^{-(n-2)/2}.
struct BubbleParams {
  double kappa = 1.0;
  std::vector<double> center;  // z, length n
  double scale = 1.0;          // lambda
  double amplitude = 1.0;      // alpha

  /// Validates positivity and the centre's length against `dim`.
  void validate(const Dimension& dim) const;

  static BubbleParams centered(const Dimension& dim, double kappa = 1.0, double scale = 1.0,
                               double amplitude = 1.0);
  /// Centre `axial` units along the field axis (the last coordinate axis).
  static BubbleParams on_axis(const Dimension& dim, double axial, double kappa = 1.0,
                              double scale = 1.0, double amplitude = 1.0);
};

}  // namespace bubblelab
