#ifndef DGPLATE_REFERENCE_BASIS_HPP
#define DGPLATE_REFERENCE_BASIS_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace dgplate {

/// Highest derivative order tabulated by the reference basis.
inline constexpr int kMaxDerivative = 3;
/// Number of mixed partials d^a_x d^b_y with a + b <= 3.
inline constexpr int kDerivativeSlots = 10;

/// Column of the mixed partial d^dx_x d^dy_y in a basis table. Slots are
/// grouped by total order: 1 | x y | xx xy yy | xxx xxy xyy yyy.
constexpr int derivative_slot(int dx, int dy) {
  const int order = dx + dy;
  return order * (order + 1) / 2 + dy;
}

/// Gauss-Legendre rule on [0, 1], exact for polynomials of degree 2n-1.
template <typename Scalar = double>
struct QuadratureRule1D {
  std::vector<Scalar> points;
  std::vector<Scalar> weights;

  int size() const { return static_cast<int>(points.size()); }
};

template <typename Scalar = double>
QuadratureRule1D<Scalar> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  // Legendre P_n and its derivative at x by the three-term recurrence.
  auto legendre = [n](Scalar x) {
    Scalar p0 = 1;
    Scalar p1 = x;
    for (int k = 2; k <= n; ++k) {
      const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const Scalar dp = (n == 1) ? Scalar(1) : n * (x * p1 - p0) / (x * x - 1);
    return std::pair<Scalar, Scalar>{p1, dp};
  };
  QuadratureRule1D<Scalar> rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Roots ordered from +1 down to -1; Newton from the classical guess.
    Scalar x = std::cos(std::numbers::pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const Scalar dx = p / dp;
      x -= dx;
      if (std::abs(dx) < Scalar(1e-16)) break;
    }
    const auto [p, dp] = legendre(x);
    (void)p;
    // Map [-1, 1] -> [0, 1] in ascending order.
    rule.points[n - 1 - i] = (Scalar(1) + x) / 2;
    rule.weights[n - 1 - i] = Scalar(1) / ((Scalar(1) - x * x) * dp * dp);
  }
  return rule;
}

/// Tensor-product Gauss rule on the unit square.
template <typename Scalar = double>
struct QuadratureRule2D {
  std::vector<Eigen::Matrix<Scalar, 2, 1>> points;
  std::vector<Scalar> weights;

  int size() const { return static_cast<int>(points.size()); }
};

template <typename Scalar = double>
QuadratureRule2D<Scalar> tensor_gauss(int n) {
  const auto line = gauss_legendre<Scalar>(n);
  QuadratureRule2D<Scalar> rule;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      rule.points.emplace_back(line.points[i], line.points[j]);
      rule.weights.push_back(line.weights[i] * line.weights[j]);
    }
  }
  return rule;
}

/// Lagrange polynomials of degree k on uniform nodes of [0, 1], stored as
/// monomial coefficients so that every derivative is exact.
template <typename Scalar = double>
class LagrangeBasis1D {
 public:
  explicit LagrangeBasis1D(int degree) : degree_(degree) {
    if (degree < 1) throw std::invalid_argument("LagrangeBasis1D: degree must be >= 1");
    for (int i = 0; i <= degree; ++i) nodes_.push_back(Scalar(i) / Scalar(degree));
    coeffs_.assign(degree + 1, std::vector<Scalar>(degree + 1, Scalar(0)));
    for (int i = 0; i <= degree; ++i) {
      std::vector<Scalar> c{Scalar(1)};
      for (int m = 0; m <= degree; ++m) {
        if (m == i) continue;
        const Scalar denom = nodes_[i] - nodes_[m];
        std::vector<Scalar> next(c.size() + 1, Scalar(0));
        for (std::size_t p = 0; p < c.size(); ++p) {
          next[p + 1] += c[p] / denom;
          next[p] -= c[p] * nodes_[m] / denom;
        }
        c = std::move(next);
      }
      coeffs_[i] = std::move(c);
    }
  }

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }
  Scalar node(int i) const { return nodes_[i]; }

  /// d-th derivative of basis function i at t.
  Scalar operator()(int i, Scalar t, int d = 0) const {
    const auto& c = coeffs_[i];
    Scalar result = 0;
    for (int p = static_cast<int>(c.size()) - 1; p >= d; --p) {
      Scalar factor = 1;
      for (int q = 0; q < d; ++q) factor *= Scalar(p - q);
      result = result * t + factor * c[p];
    }
    return result;
  }

 private:
  int degree_;
  std::vector<Scalar> nodes_;
  std::vector<std::vector<Scalar>> coeffs_;
};

/// Values and mixed partials of every basis function at one point:
/// rows are basis functions, columns are derivative slots.
template <typename Scalar = double>
using BasisJet = Eigen::Matrix<Scalar, Eigen::Dynamic, kDerivativeSlots>;

/// Tensor-product Q_k Lagrange basis on [0, 1]^2. Basis function
/// b = iy * (k + 1) + ix interpolates at node (ix / k, iy / k).
template <typename Scalar = double>
class TensorBasis {
 public:
  using Point = Eigen::Matrix<Scalar, 2, 1>;

  explicit TensorBasis(int degree = 2) : line_(degree) {}

  int degree() const { return line_.degree(); }
  int size() const { return line_.size() * line_.size(); }

  Point node(int b) const {
    const int n = line_.size();
    return Point(line_.node(b % n), line_.node(b / n));
  }

  Scalar derivative(int b, int dx, int dy, const Point& p) const {
    const int n = line_.size();
    return line_(b % n, p.x(), dx) * line_(b / n, p.y(), dy);
  }

  /// Tabulates all mixed partials up to `max_derivative` at `p`; higher
  /// slots are left zero.
  BasisJet<Scalar> tabulate(const Point& p, int max_derivative = kMaxDerivative) const {
    if (max_derivative < 0 || max_derivative > kMaxDerivative) {
      throw std::invalid_argument("TensorBasis::tabulate: derivatives above third order are not supported");
    }
    const int n = line_.size();
    std::array<std::vector<Scalar>, kMaxDerivative + 1> ux;
    std::array<std::vector<Scalar>, kMaxDerivative + 1> uy;
    for (int d = 0; d <= max_derivative; ++d) {
      ux[d].resize(n);
      uy[d].resize(n);
      for (int i = 0; i < n; ++i) {
        ux[d][i] = line_(i, p.x(), d);
        uy[d][i] = line_(i, p.y(), d);
      }
    }
    BasisJet<Scalar> jet = BasisJet<Scalar>::Zero(size(), kDerivativeSlots);
    for (int order = 0; order <= max_derivative; ++order) {
      for (int dy = 0; dy <= order; ++dy) {
        const int dx = order - dy;
        const int slot = derivative_slot(dx, dy);
        for (int b = 0; b < size(); ++b) jet(b, slot) = ux[dx][b % n] * uy[dy][b / n];
      }
    }
    return jet;
  }

  std::vector<BasisJet<Scalar>> tabulate(const std::vector<Point>& points,
                                         int max_derivative = kMaxDerivative) const {
    std::vector<BasisJet<Scalar>> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(tabulate(p, max_derivative));
    return out;
  }

 private:
  LagrangeBasis1D<Scalar> line_;
};

/// Rescales reference partials to an axis-aligned cell of size hx x hy.
template <typename Scalar>
BasisJet<Scalar> map_to_cell(const BasisJet<Scalar>& reference, Scalar hx, Scalar hy) {
  BasisJet<Scalar> out = reference;
  for (int order = 0; order <= kMaxDerivative; ++order) {
    for (int dy = 0; dy <= order; ++dy) {
      const int dx = order - dy;
      out.col(derivative_slot(dx, dy)) *= std::pow(hx, -dx) * std::pow(hy, -dy);
    }
  }
  return out;
}

}  // namespace dgplate

#endif  // DGPLATE_REFERENCE_BASIS_HPP
