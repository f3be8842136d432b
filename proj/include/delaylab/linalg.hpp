#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace delaylab::detail {

struct LinearSolution {
    std::vector<double> x;
    double condition{0.0};  // 1 / rcond of the equilibrated matrix
};

/// Solves A x = rhs by LU with partial pivoting after row and column
/// equilibration. The reported condition estimate refers to the scaled matrix.
inline LinearSolution solve_equilibrated(Eigen::MatrixXd A, Eigen::VectorXd rhs) {
    const Eigen::Index n = A.rows();
    Eigen::VectorXd col_scale = Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = A.row(i).cwiseAbs().maxCoeff();
        if (r > 0.0) {
            A.row(i) /= r;
            rhs(i) /= r;
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        const double c = A.col(j).cwiseAbs().maxCoeff();
        if (c > 0.0) {
            A.col(j) /= c;
            col_scale(j) = c;
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double rcond = lu.rcond();
    LinearSolution out;
    out.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!std::isfinite(out.condition)) return out;
    Eigen::VectorXd y = lu.solve(rhs);
    out.x.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) out.x[static_cast<std::size_t>(j)] = y(j) / col_scale(j);
    return out;
}

}  // namespace delaylab::detail
