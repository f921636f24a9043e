#pragma once

// Small dense interval linear algebra shared by the verification
// routines. Interval matrices are row-major vector-of-rows.

#include <vector>

#include <Eigen/Dense>

#include "blowup/interval.hpp"

namespace blowup {

using IVec = std::vector<Interval>;
using IMat = std::vector<std::vector<Interval>>;

IMat imat_zero(int rows, int cols);
IMat imat_identity(int n);

IVec imat_vec(const IMat& A, const IVec& v);
IMat imat_mul(const IMat& A, const IMat& B);
IMat imat_add(const IMat& A, const IMat& B);
IMat imat_sub(const IMat& A, const IMat& B);

IVec ivec_add(const IVec& a, const IVec& b);
IVec ivec_sub(const IVec& a, const IVec& b);

Eigen::MatrixXd imat_mid(const IMat& A);
Eigen::VectorXd ivec_mid(const IVec& v);
IMat dmat_to_imat(const Eigen::MatrixXd& A);
IVec dvec_to_ivec(const Eigen::VectorXd& v);

// Products with an exact double factor (each entry enters as a point).
IMat dmat_imat_mul(const Eigen::MatrixXd& A, const IMat& B);
IVec dmat_ivec_mul(const Eigen::MatrixXd& A, const IVec& v);

// max_i sum_j mag(A_ij)
double imat_norm_inf(const IMat& A);

Interval imat_det_small(const IMat& A);       // n <= 3
IMat imat_inverse_small(const IMat& A);       // adjugate / det, n <= 3

// Interval Cholesky: success proves every symmetric matrix in S is
// positive definite.
bool is_positive_definite_sym(const IMat& S);
bool is_negative_definite_sym(const IMat& S);

// Symmetrized interval (A + A^T) / 2.
IMat imat_symmetrize(const IMat& A);

} // namespace blowup
