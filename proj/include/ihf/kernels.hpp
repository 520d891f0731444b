#pragma once

#include <span>

#include "ihf/grid.hpp"

// Fixed-point sweeps of the length-weighted midrange scheme. Every kernel
// exists twice: an OpenMP version used by the solver and a plain serial
// version kept as the reference the parallel one is tested against. Both
// produce bit-identical results for the same ordering.
namespace ihf::kernels {

// Value t balancing the steepest ascent and descent slopes over the stencil
// of the k-th interior node:
//   max_j (u_j - t) / l_j == max_k (t - u_k) / l_k.
// With equal offset lengths this is (max u_j + min u_j) / 2.
double local_midrange(const Domain& d, std::size_t k, const double* u);

namespace serial {
// Gauss-Seidel over the colour classes in order; returns the max |update|.
double colored_sweep(const Domain& d, std::span<double> u);
// Simultaneous update out <- T(in) on interior nodes; returns max |update|.
double jacobi_sweep(const Domain& d, std::span<const double> in, std::span<double> out);
double residual_max(const Domain& d, std::span<const double> u);
}  // namespace serial

namespace omp {
double colored_sweep(const Domain& d, std::span<double> u);
double jacobi_sweep(const Domain& d, std::span<const double> in, std::span<double> out);
double residual_max(const Domain& d, std::span<const double> u);
}  // namespace omp

}  // namespace ihf::kernels
