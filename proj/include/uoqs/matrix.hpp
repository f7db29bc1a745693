#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace uoqs {

/// Dense real matrix of order 1..4, row-major. Big enough for every Jacobian
/// and block in this project; no dynamic allocation.
class SquareMatrix {
 public:
  explicit SquareMatrix(int order) : order_(order) {
    if (order < 1 || order > 4) throw std::invalid_argument("SquareMatrix: order must be 1..4");
    a_.fill(0.0);
  }

  int order() const { return order_; }
  double& at(int i, int j) { return a_[static_cast<std::size_t>(i * order_ + j)]; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i * order_ + j)]; }

  bool operator==(const SquareMatrix& other) const = default;

 private:
  int order_;
  std::array<double, 16> a_;
};

inline SquareMatrix identity(int order) {
  SquareMatrix m(order);
  for (int i = 0; i < order; ++i) m.at(i, i) = 1.0;
  return m;
}

inline SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.order() != b.order()) throw std::invalid_argument("matrix subtraction: order mismatch");
  SquareMatrix r(a.order());
  for (int i = 0; i < a.order(); ++i)
    for (int j = 0; j < a.order(); ++j) r.at(i, j) = a.at(i, j) - b.at(i, j);
  return r;
}

inline SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.order() != b.order()) throw std::invalid_argument("matrix product: order mismatch");
  SquareMatrix r(a.order());
  for (int i = 0; i < a.order(); ++i)
    for (int j = 0; j < a.order(); ++j) {
      double acc = 0.0;
      for (int k = 0; k < a.order(); ++k) acc += a.at(i, k) * b.at(k, j);
      r.at(i, j) = acc;
    }
  return r;
}

inline double trace(const SquareMatrix& m) {
  double t = 0.0;
  for (int i = 0; i < m.order(); ++i) t += m.at(i, i);
  return t;
}

/// Max row sum of absolute values.
inline double norm_inf(const SquareMatrix& m) {
  double best = 0.0;
  for (int i = 0; i < m.order(); ++i) {
    double row = 0.0;
    for (int j = 0; j < m.order(); ++j) row += std::abs(m.at(i, j));
    best = std::max(best, row);
  }
  return best;
}

/// det(m) by cofactor expansion; fine at these orders.
inline double det(const SquareMatrix& m) {
  switch (m.order()) {
    case 1:
      return m.at(0, 0);
    case 2:
      return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    case 3:
      return m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1)) -
             m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) - m.at(1, 2) * m.at(2, 0)) +
             m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0));
    default: {
      double acc = 0.0;
      for (int j = 0; j < 4; ++j) {
        SquareMatrix minor(3);
        for (int r = 1; r < 4; ++r) {
          int cc = 0;
          for (int c = 0; c < 4; ++c) {
            if (c == j) continue;
            minor.at(r - 1, cc++) = m.at(r, c);
          }
        }
        acc += (j % 2 == 0 ? 1.0 : -1.0) * m.at(0, j) * det(minor);
      }
      return acc;
    }
  }
}

/// det(m - z*I) for complex z, by Gaussian elimination with partial pivoting.
inline std::complex<double> det_shifted(const SquareMatrix& m, std::complex<double> z) {
  const int n = m.order();
  std::array<std::complex<double>, 16> a{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i * n + j)] = m.at(i, j) - (i == j ? z : 0.0);

  auto at = [&](int i, int j) -> std::complex<double>& { return a[static_cast<std::size_t>(i * n + j)]; };
  std::complex<double> d = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
    if (pivot != col) {
      for (int c = col; c < n; ++c) std::swap(at(pivot, c), at(col, c));
      d = -d;
    }
    if (at(col, col) == 0.0) return 0.0;
    d *= at(col, col);
    for (int r = col + 1; r < n; ++r) {
      const std::complex<double> f = at(r, col) / at(col, col);
      for (int c = col; c < n; ++c) at(r, c) -= f * at(col, c);
    }
  }
  return d;
}

/// Monic characteristic polynomial det(x*I - m), coefficients by ascending
/// power (size order+1, leading 1), via the Faddeev-LeVerrier recurrence.
inline std::vector<double> characteristic_polynomial(const SquareMatrix& m) {
  const int n = m.order();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[static_cast<std::size_t>(n)] = 1.0;
  SquareMatrix work = m;
  for (int k = 1; k <= n; ++k) {
    if (k > 1) {
      SquareMatrix shifted = work;
      for (int i = 0; i < n; ++i) shifted.at(i, i) += c[static_cast<std::size_t>(n - k + 1)];
      work = m * shifted;
    }
    c[static_cast<std::size_t>(n - k)] = -trace(work) / k;
  }
  return c;
}

namespace detail {

using cplx = std::complex<double>;

inline cplx horner(const std::vector<double>& coeffs, cplx x) {
  cplx acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

inline cplx horner_derivative(const std::vector<double>& coeffs, cplx x) {
  cplx acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * coeffs[i];
  return acc;
}

inline std::vector<double> derivative(const std::vector<double>& coeffs) {
  std::vector<double> d;
  for (std::size_t i = 1; i < coeffs.size(); ++i) d.push_back(static_cast<double>(i) * coeffs[i]);
  return d;
}

// x^2 + p*x + q = 0, numerically stable split of the two roots.
inline void roots_quadratic(double p, double q, std::vector<cplx>& out) {
  const double disc = p * p - 4.0 * q;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double big = -(p + std::copysign(root, p)) / 2.0;
    out.push_back(big);
    out.push_back(big != 0.0 ? q / big : 0.0);
  } else {
    const double re = -p / 2.0;
    const double im = std::sqrt(-disc) / 2.0;
    out.emplace_back(re, im);
    out.emplace_back(re, -im);
  }
}

// x^3 + a*x^2 + b*x + c = 0; trigonometric form for three real roots,
// Cardano otherwise.
inline void roots_cubic(double a, double b, double c, std::vector<cplx>& out) {
  const double q = (a * a - 3.0 * b) / 9.0;
  const double r = (a * (2.0 * a * a - 9.0 * b) + 27.0 * c) / 54.0;
  const double q3 = q * q * q;
  if (r * r <= q3) {
    double t = q3 > 0.0 ? r / std::sqrt(q3) : 0.0;
    t = std::clamp(t, -1.0, 1.0);
    const double theta = std::acos(t);
    const double tau = 2.0 * std::numbers::pi;
    const double f = -2.0 * std::sqrt(std::max(q, 0.0));
    out.push_back(f * std::cos(theta / 3.0) - a / 3.0);
    out.push_back(f * std::cos((theta + tau) / 3.0) - a / 3.0);
    out.push_back(f * std::cos((theta - tau) / 3.0) - a / 3.0);
  } else {
    const double big = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r * r - q3)), r);
    const double small = big != 0.0 ? q / big : 0.0;
    out.push_back(big + small - a / 3.0);
    const double re = -(big + small) / 2.0 - a / 3.0;
    const double im = std::sqrt(3.0) * (big - small) / 2.0;
    out.emplace_back(re, im);
    out.emplace_back(re, -im);
  }
}

// x^4 + a*x^3 + b*x^2 + c*x + d = 0 by factoring the depressed quartic into
// two quadratics through a real root of the resolvent cubic.
inline void roots_quartic(double a, double b, double c, double d, std::vector<cplx>& out) {
  // depress: x = y - a/4 gives y^4 + p y^2 + q y + r
  const double p = b - 3.0 * a * a / 8.0;
  const double q = c - a * b / 2.0 + a * a * a / 8.0;
  const double r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;
  const double shift = -a / 4.0;

  std::vector<cplx> ys;
  const double scale = 1.0 + std::abs(p) + std::abs(q) + std::abs(r);
  if (std::abs(q) <= 1e-14 * scale) {
    // biquadratic: w^2 + p w + r with y = +-sqrt(w)
    std::vector<cplx> ws;
    roots_quadratic(p, r, ws);
    for (const cplx& w : ws) {
      const cplx root = std::sqrt(w);
      ys.push_back(root);
      ys.push_back(-root);
    }
  } else {
    // resolvent z^3 + 2p z^2 + (p^2 - 4r) z - q^2 = 0 has a positive real root
    std::vector<cplx> zs;
    roots_cubic(2.0 * p, p * p - 4.0 * r, -q * q, zs);
    double z = 0.0;
    for (const cplx& cand : zs)
      if (std::abs(cand.imag()) <= 1e-9 * (1.0 + std::abs(cand.real())))
        z = std::max(z, cand.real());
    if (z <= 0.0) z = std::abs(zs.front());
    const double alpha = std::sqrt(z);
    const double beta = (p + z) / 2.0 - q / (2.0 * alpha);
    const double gamma = (p + z) / 2.0 + q / (2.0 * alpha);
    roots_quadratic(alpha, beta, ys);   // y^2 + alpha y + beta
    roots_quadratic(-alpha, gamma, ys); // y^2 - alpha y + gamma
  }
  for (const cplx& y : ys) out.push_back(y + shift);
}

}  // namespace detail

/// Raised when computed eigenvalues fail their own residual check.
struct EigenvalueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// |det(m - r*I)|, the residual by which a candidate eigenvalue misses.
inline double eigen_residual(const SquareMatrix& m, std::complex<double> r) {
  return std::abs(det_shifted(m, r));
}

/// Eigenvalues as roots of the characteristic polynomial: closed-form
/// quadratic/cubic/quartic solves, then a few Newton polish steps. Every root
/// is verified against det(m - r*I); failure throws EigenvalueError instead
/// of returning silently wrong values.
inline std::vector<std::complex<double>> eigenvalues_numeric(const SquareMatrix& m) {
  using detail::cplx;
  const std::vector<double> poly = characteristic_polynomial(m);
  std::vector<cplx> roots;
  switch (m.order()) {
    case 1:
      roots.push_back(-poly[0]);
      break;
    case 2:
      detail::roots_quadratic(poly[1], poly[0], roots);
      break;
    case 3:
      detail::roots_cubic(poly[2], poly[1], poly[0], roots);
      break;
    default:
      detail::roots_quartic(poly[3], poly[2], poly[1], poly[0], roots);
      break;
  }

  for (cplx& r : roots) {
    for (int it = 0; it < 4; ++it) {
      const cplx f = detail::horner(poly, r);
      const cplx df = detail::horner_derivative(poly, r);
      if (f == 0.0 || df == 0.0) break;
      const cplx next = r - f / df;
      if (std::abs(detail::horner(poly, next)) >= std::abs(f)) break;
      r = next;
    }
  }

  // Coefficient rounding splits a multiple root into a tight symmetric
  // cluster; the cluster mean recovers it to full precision. Roots closer
  // than ~1e-6 relative are therefore reported as one repeated value.
  double scale = 1.0;
  for (const cplx& r : roots) scale = std::max(scale, std::abs(r));
  const double cluster_tol = 1e-6 * scale;
  std::vector<int> group(roots.size(), -1);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (group[i] >= 0) continue;
    group[i] = static_cast<int>(i);
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (group[j] < 0 && std::abs(roots[i] - roots[j]) <= cluster_tol)
        group[j] = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (group[i] != static_cast<int>(i)) continue;
    cplx sum = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < roots.size(); ++j)
      if (group[j] == static_cast<int>(i)) {
        sum += roots[j];
        ++count;
      }
    cplx mean = sum / static_cast<double>(count);
    if (count >= 2) {
      // an m-fold root of p is a simple root of p^(m-1); Newton there
      // converges quadratically where plain Newton on p stalls
      std::vector<double> reduced = poly;
      for (int d = 1; d < count; ++d) reduced = detail::derivative(reduced);
      for (int it = 0; it < 6; ++it) {
        const cplx f = detail::horner(reduced, mean);
        const cplx df = detail::horner_derivative(reduced, mean);
        if (f == 0.0 || df == 0.0) break;
        mean -= f / df;
      }
    }
    for (std::size_t j = 0; j < roots.size(); ++j)
      if (group[j] == static_cast<int>(i)) roots[j] = mean;
  }

  // real axis snap: conjugate-pair imaginary parts that are pure rounding
  for (cplx& r : roots)
    if (std::abs(r.imag()) <= 1e-9 * (1.0 + std::abs(r.real()))) r = cplx(r.real(), 0.0);

  const double tol = 1e-6 * (1.0 + norm_inf(m));
  for (const cplx& r : roots)
    if (!(eigen_residual(m, r) <= tol))
      throw EigenvalueError("eigenvalues_numeric: residual check failed (ill-conditioned matrix)");
  return roots;
}

/// Largest |eigenvalue|.
inline double spectral_radius(const SquareMatrix& m) {
  double best = 0.0;
  for (const auto& r : eigenvalues_numeric(m)) best = std::max(best, std::abs(r));
  return best;
}

}  // namespace uoqs
