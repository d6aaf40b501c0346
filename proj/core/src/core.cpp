#include "bubblelab/core.hpp"

#include <cmath>
#include <numeric>

namespace bubblelab {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

Rational operator+(Rational a, Rational b) {
  return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}
Rational operator-(Rational a, Rational b) {
  return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
}
Rational operator*(Rational a, Rational b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
Rational operator/(Rational a, Rational b) {
  if (b.num_ == 0) throw InvalidArgument("rational division by zero");
  return {a.num_ * b.den_, a.den_ * b.num_};
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Dimension::Dimension(int n) : n_(n) {
  if (n < 3) throw InvalidArgument("dimension must satisfy n >= 3, got " + std::to_string(n));
  p_ = Rational(n + 2, n - 2);
  two_star_ = Rational(2 * n, n - 2);
  m_ = Rational(n - 2, n + 2);
  c_flow_ = Rational(1, 1) / (Rational(1, 1) - m_);
  sphere_shift_ = Rational(n * (n - 2), 4);
}

double Dimension::sphere_area(int k) {
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(M_PI, h) / std::tgamma(h);
}

Dimension make_dimension(int n) { return Dimension(n); }

void BubbleParams::validate(const Dimension& dim) const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("bubble kappa must be > 0");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("bubble scale must be > 0");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude))
    throw InvalidArgument("bubble amplitude must be > 0");
  if (center.size() != static_cast<std::size_t>(dim.n()))
    throw InvalidArgument("bubble centre must have n components");
  for (double c : center)
    if (!std::isfinite(c)) throw InvalidArgument("bubble centre must be finite");
}

BubbleParams BubbleParams::centered(const Dimension& dim, double kappa, double scale,
                                    double amplitude) {
  return on_axis(dim, 0.0, kappa, scale, amplitude);
}

BubbleParams BubbleParams::on_axis(const Dimension& dim, double axial, double kappa, double scale,
                                   double amplitude) {
  BubbleParams b;
  b.kappa = kappa;
  b.center.assign(dim.n(), 0.0);
  b.center.back() = axial;
  b.scale = scale;
  b.amplitude = amplitude;
  b.validate(dim);
  return b;
}

}  // namespace bubblelab
