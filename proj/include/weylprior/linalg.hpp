#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace weylprior {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dense m x m x m array with (i, j, k) addressing, row-major in k.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Eigen::Index m) : m_(m), data_(static_cast<std::size_t>(m * m * m), 0.0) {}

  Eigen::Index dim() const { return m_; }

  double& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    return data_[static_cast<std::size_t>((i * m_ + j) * m_ + k)];
  }
  double operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return data_[static_cast<std::size_t>((i * m_ + j) * m_ + k)];
  }

  const std::vector<double>& data() const { return data_; }
  double* raw() { return data_.data(); }

  Tensor3& operator+=(const Tensor3& o);
  Tensor3& operator-=(const Tensor3& o);
  Tensor3& operator*=(double s);

  double max_abs() const;

 private:
  Eigen::Index m_ = 0;
  std::vector<double> data_;
};

Tensor3 operator+(Tensor3 a, const Tensor3& b);
Tensor3 operator-(Tensor3 a, const Tensor3& b);
Tensor3 operator*(double s, Tensor3 a);
Tensor3 operator*(Tensor3 a, double s);
Tensor3 operator/(Tensor3 a, double s);

/// Average over all six index permutations.
Tensor3 symmetrized(const Tensor3& t);

/// max |t(i,j,k) - t(σ(i,j,k))| over all permutations σ.
double permutation_asymmetry(const Tensor3& t);

/// max |t(i,j,k) - t(i,k,j)|: torsion of a connection-coefficient array.
double lower_pair_asymmetry(const Tensor3& t);

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

std::vector<double> to_std(const Vec& v);
Vec from_std(const std::vector<double>& v);
std::string format_vector(const Vec& v);

}  // namespace weylprior
