#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace platoonlab {

/// Real-coefficient polynomial, coefficients stored in ascending powers.
/// Leading coefficients are trimmed at a relative 1e-12 tolerance so that
/// degree() reflects the numerically meaningful degree.
class RealPolynomial {
public:
  RealPolynomial() : coeffs_{0.0} {}

  explicit RealPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    trim();
  }

  static RealPolynomial constant(double c) { return RealPolynomial({c}); }

  /// c0 + c1 s (+ c2 s^2), the building blocks of the platoon factors.
  static RealPolynomial linear(double c0, double c1) { return RealPolynomial({c0, c1}); }
  static RealPolynomial quadratic(double c0, double c1, double c2) {
    return RealPolynomial({c0, c1, c2});
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double operator[](int k) const {
    return (k >= 0 && k <= degree()) ? coeffs_[static_cast<std::size_t>(k)] : 0.0;
  }

  double eval(double s) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
    return acc;
  }

  std::complex<double> eval(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
    return acc;
  }

  std::complex<double> eval_derivative(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (int k = degree(); k >= 1; --k) acc = acc * s + static_cast<double>(k) * coeffs_[static_cast<std::size_t>(k)];
    return acc;
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  friend RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b) {
    std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[static_cast<int>(k)] + b[static_cast<int>(k)];
    return RealPolynomial(std::move(c));
  }

  friend RealPolynomial operator-(const RealPolynomial& a, const RealPolynomial& b) {
    std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[static_cast<int>(k)] - b[static_cast<int>(k)];
    return RealPolynomial(std::move(c));
  }

  friend RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return RealPolynomial();
    std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return RealPolynomial(std::move(c));
  }

  friend RealPolynomial operator*(double k, const RealPolynomial& a) {
    std::vector<double> c = a.coeffs_;
    for (double& v : c) v *= k;
    return RealPolynomial(std::move(c));
  }

private:
  void trim() {
    const double tol = 1e-12 * std::max(1.0, max_abs_coefficient());
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= tol) coeffs_.pop_back();
  }

  std::vector<double> coeffs_;
};

/// Backward-error residual of a candidate root: |p(r)| over the evaluation
/// scale sum |c_k| max(1,|r|)^k. A value near machine epsilon means r is an
/// exact root of a relatively perturbed polynomial.
inline double root_residual(const RealPolynomial& p, std::complex<double> r) {
  const double m = std::max(1.0, std::abs(r));
  double scale = 0.0, mk = 1.0;
  for (int k = 0; k <= p.degree(); ++k) {
    scale += std::abs(p[k]) * mk;
    mk *= m;
  }
  return std::abs(p.eval(r)) / scale;
}

/// All complex roots via eigenvalues of the (balanced by Eigen) companion
/// matrix, each polished with safeguarded Newton steps. Residuals satisfy
/// root_residual(p, r) < 1e-8.
inline std::vector<std::complex<double>> polynomial_roots(const RealPolynomial& p) {
  if (p.is_zero()) throw std::invalid_argument("polynomial_roots: zero polynomial");
  const int d = p.degree();
  if (d < 1) throw std::invalid_argument("polynomial_roots: degree must be >= 1");

  const double lead = p[d];
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d - 1; ++k) companion(k + 1, k) = 1.0;
  for (int k = 0; k < d; ++k) companion(k, d - 1) = -p[k] / lead;

  const Eigen::VectorXcd eig = companion.eigenvalues();
  std::vector<std::complex<double>> roots;
  roots.reserve(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    std::complex<double> r = eig(k);
    double best = std::abs(p.eval(r));
    for (int it = 0; it < 10 && best > 0.0; ++it) {
      const std::complex<double> dp = p.eval_derivative(r);
      if (std::abs(dp) == 0.0) break;
      const std::complex<double> candidate = r - p.eval(r) / dp;
      const double res = std::abs(p.eval(candidate));
      if (!std::isfinite(res) || res >= best) break;
      r = candidate;
      best = res;
    }
    roots.push_back(r);
  }
  return roots;
}

} // namespace platoonlab
