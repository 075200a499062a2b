#pragma once

#include "svrpl/types.hpp"

namespace svrpl {

// Coordinatewise soft-thresholding: argmin_u { lambda ||u||_1 + ||u - v||^2 / (2t) }.
Vector prox_l1(const Vector& v, double t, double lambda);

// Euclidean projection onto the unit simplex {u >= 0, sum u = 1}
// (sort-and-threshold).
Vector project_simplex(const Vector& v);

Vector project_linf_ball(const Vector& v, double radius);
Vector project_l2_ball(const Vector& v, double radius);

// Largest singular value by power iteration on the smaller Gram matrix.
// Stops after 200 iterations or when the relative change drops to 1e-12.
double spectral_norm(const Matrix& j);

}  // namespace svrpl
