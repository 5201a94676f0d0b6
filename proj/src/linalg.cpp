#include "weylprior/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace weylprior {

Tensor3& Tensor3::operator+=(const Tensor3& o) {
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& o) {
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
  return *this;
}

Tensor3& Tensor3::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

double Tensor3::max_abs() const {
  double r = 0.0;
  for (double v : data_) r = std::max(r, std::abs(v));
  return r;
}

Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
Tensor3 operator*(double s, Tensor3 a) { return a *= s; }
Tensor3 operator*(Tensor3 a, double s) { return a *= s; }
Tensor3 operator/(Tensor3 a, double s) { return a *= 1.0 / s; }

Tensor3 symmetrized(const Tensor3& t) {
  const auto m = t.dim();
  Tensor3 out(m);
  // One value per sorted index triple, copied to every permutation, so the
  // result is symmetric bit for bit.
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j)
      for (Eigen::Index k = j; k < m; ++k) {
        const double v =
            (t(i, j, k) + t(i, k, j) + t(j, i, k) + t(j, k, i) + t(k, i, j) + t(k, j, i)) / 6.0;
        out(i, j, k) = out(i, k, j) = out(j, i, k) = out(j, k, i) = out(k, i, j) = out(k, j, i) = v;
      }
  return out;
}

double permutation_asymmetry(const Tensor3& t) {
  const auto m = t.dim();
  double r = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < m; ++k) {
        const double v = t(i, j, k);
        const std::array<double, 5> others{t(i, k, j), t(j, i, k), t(j, k, i), t(k, i, j), t(k, j, i)};
        for (double o : others) r = std::max(r, std::abs(v - o));
      }
  return r;
}

double lower_pair_asymmetry(const Tensor3& t) {
  const auto m = t.dim();
  double r = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < m; ++k) r = std::max(r, std::abs(t(i, j, k) - t(i, k, j)));
  return r;
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string format_vector(const Vec& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

}  // namespace weylprior
