#pragma once

#include <Eigen/Dense>

namespace rdmeta {

using Real = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr Real kPi = 3.14159265358979323846;

/// L2 norm on the unit torus for a field sampled on a uniform grid.
inline Real grid_l2_norm(const Vector& u) { return std::sqrt(u.squaredNorm() / Real(u.size())); }

/// L1 norm on the unit torus for a grid field.
inline Real grid_l1_norm(const Vector& u) { return u.lpNorm<1>() / Real(u.size()); }

/// Inner product <u,v> = int u v dtheta on the unit torus.
inline Real grid_inner(const Vector& u, const Vector& v) { return u.dot(v) / Real(u.size()); }

}  // namespace rdmeta
