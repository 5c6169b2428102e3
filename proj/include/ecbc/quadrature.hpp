#pragma once

#include <vector>

namespace ecbc {

//! Gauss-Legendre rule mapped to [0, 1]; exact for polynomials of degree
//! below 2 * nodes.size().
struct GaussLegendre
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre_unit(int order);

} // namespace ecbc
