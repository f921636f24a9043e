#include "blowup/linalg.hpp"

namespace blowup {

IMat imat_zero(int rows, int cols) { return IMat(rows, IVec(cols, Interval(0.0))); }

IMat imat_identity(int n) {
    IMat I = imat_zero(n, n);
    for (int i = 0; i < n; ++i) I[i][i] = Interval(1.0);
    return I;
}

IVec imat_vec(const IMat& A, const IVec& v) {
    IVec out(A.size(), Interval(0.0));
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i].size() != v.size()) throw ShapeError("imat_vec: size mismatch");
        Interval acc(0.0);
        for (std::size_t j = 0; j < v.size(); ++j) acc += A[i][j] * v[j];
        out[i] = acc;
    }
    return out;
}

IMat imat_mul(const IMat& A, const IMat& B) {
    const std::size_t r = A.size(), inner = B.size(), c = B.empty() ? 0 : B[0].size();
    IMat out = imat_zero(static_cast<int>(r), static_cast<int>(c));
    for (std::size_t i = 0; i < r; ++i) {
        if (A[i].size() != inner) throw ShapeError("imat_mul: size mismatch");
        for (std::size_t k = 0; k < inner; ++k) {
            const Interval& a = A[i][k];
            if (a.lo() == 0.0 && a.hi() == 0.0) continue;
            for (std::size_t j = 0; j < c; ++j) out[i][j] += a * B[k][j];
        }
    }
    return out;
}

IMat imat_add(const IMat& A, const IMat& B) {
    IMat out = A;
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A[i].size(); ++j) out[i][j] += B[i][j];
    return out;
}

IMat imat_sub(const IMat& A, const IMat& B) {
    IMat out = A;
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A[i].size(); ++j) out[i][j] -= B[i][j];
    return out;
}

IVec ivec_add(const IVec& a, const IVec& b) {
    IVec out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += b[i];
    return out;
}

IVec ivec_sub(const IVec& a, const IVec& b) {
    IVec out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out[i] -= b[i];
    return out;
}

Eigen::MatrixXd imat_mid(const IMat& A) {
    Eigen::MatrixXd M(A.size(), A.empty() ? 0 : A[0].size());
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A[i].size(); ++j) M(i, j) = A[i][j].mid();
    return M;
}

Eigen::VectorXd ivec_mid(const IVec& v) {
    Eigen::VectorXd m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m(i) = v[i].mid();
    return m;
}

IMat dmat_to_imat(const Eigen::MatrixXd& A) {
    IMat out = imat_zero(static_cast<int>(A.rows()), static_cast<int>(A.cols()));
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) out[i][j] = Interval(A(i, j));
    return out;
}

IVec dvec_to_ivec(const Eigen::VectorXd& v) {
    IVec out(v.size(), Interval(0.0));
    for (int i = 0; i < v.size(); ++i) out[i] = Interval(v(i));
    return out;
}

IMat dmat_imat_mul(const Eigen::MatrixXd& A, const IMat& B) {
    IMat out = imat_zero(static_cast<int>(A.rows()), B.empty() ? 0 : static_cast<int>(B[0].size()));
    for (int i = 0; i < A.rows(); ++i)
        for (int k = 0; k < A.cols(); ++k) {
            if (A(i, k) == 0.0) continue;
            for (std::size_t j = 0; j < B[k].size(); ++j) out[i][j] += A(i, k) * B[k][j];
        }
    return out;
}

IVec dmat_ivec_mul(const Eigen::MatrixXd& A, const IVec& v) {
    IVec out(A.rows(), Interval(0.0));
    for (int i = 0; i < A.rows(); ++i) {
        Interval acc(0.0);
        for (int j = 0; j < A.cols(); ++j) acc += A(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

double imat_norm_inf(const IMat& A) {
    double worst = 0.0;
    for (const auto& row : A) {
        Interval acc(0.0);
        for (const auto& e : row) acc += Interval(e.mag());
        worst = std::max(worst, acc.hi());
    }
    return worst;
}

Interval imat_det_small(const IMat& A) {
    const std::size_t n = A.size();
    if (n == 1) return A[0][0];
    if (n == 2) return A[0][0] * A[1][1] - A[0][1] * A[1][0];
    if (n == 3)
        return A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1])
               - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0])
               + A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
    throw ShapeError("imat_det_small: n > 3");
}

IMat imat_inverse_small(const IMat& A) {
    const std::size_t n = A.size();
    Interval det = imat_det_small(A);
    if (det.contains(0.0)) throw DomainError("imat_inverse_small: determinant straddles zero");
    IMat out = imat_zero(static_cast<int>(n), static_cast<int>(n));
    if (n == 1) {
        out[0][0] = Interval(1.0) / det;
    } else if (n == 2) {
        out[0][0] = A[1][1] / det;
        out[0][1] = -A[0][1] / det;
        out[1][0] = -A[1][0] / det;
        out[1][1] = A[0][0] / det;
    } else {
        auto cof = [&](int r0, int r1, int c0, int c1) {
            return A[r0][c0] * A[r1][c1] - A[r0][c1] * A[r1][c0];
        };
        out[0][0] = cof(1, 2, 1, 2) / det;
        out[0][1] = -cof(0, 2, 1, 2) / det;
        out[0][2] = cof(0, 1, 1, 2) / det;
        out[1][0] = -cof(1, 2, 0, 2) / det;
        out[1][1] = cof(0, 2, 0, 2) / det;
        out[1][2] = -cof(0, 1, 0, 2) / det;
        out[2][0] = cof(1, 2, 0, 1) / det;
        out[2][1] = -cof(0, 2, 0, 1) / det;
        out[2][2] = cof(0, 1, 0, 1) / det;
    }
    return out;
}

bool is_positive_definite_sym(const IMat& S) {
    const std::size_t n = S.size();
    IMat L = imat_zero(static_cast<int>(n), static_cast<int>(n));
    for (std::size_t j = 0; j < n; ++j) {
        Interval d = S[j][j];
        for (std::size_t k = 0; k < j; ++k) d -= L[j][k] * L[j][k];
        if (!(d.lo() > 0.0)) return false;
        L[j][j] = sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            Interval s = S[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
            L[i][j] = s / L[j][j];
        }
    }
    return true;
}

bool is_negative_definite_sym(const IMat& S) {
    IMat neg = S;
    for (auto& row : neg)
        for (auto& e : row) e = -e;
    return is_positive_definite_sym(neg);
}

IMat imat_symmetrize(const IMat& A) {
    const std::size_t n = A.size();
    IMat out = imat_zero(static_cast<int>(n), static_cast<int>(n));
    for (std::size_t i = 0; i < n; ++i) {
        out[i][i] = A[i][i];
        for (std::size_t j = i + 1; j < n; ++j) {
            Interval v = (A[i][j] + A[j][i]) * 0.5;
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    return out;
}

} // namespace blowup
