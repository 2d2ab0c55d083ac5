#include "dice/glasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

namespace dice {
namespace {

double soft_threshold(double z, double lambda) {
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

constexpr std::size_t kMaxInnerPasses = 10000;

// Solves the column-j lasso in place on b (warm start) and writes W_{-j,j} = W_{-j,-j} b.
void update_column(Eigen::MatrixXd& w, const Eigen::MatrixXd& s, Eigen::Ref<Eigen::VectorXd> b,
                   Eigen::Index j, double lambda, double inner_tol) {
    const Eigen::Index p = w.rows();
    b(j) = 0.0;
    Eigen::VectorXd g = w * b;
    for (std::size_t pass = 0; pass < kMaxInnerPasses; ++pass) {
        double max_step = 0.0;
        for (Eigen::Index k = 0; k < p; ++k) {
            if (k == j) continue;
            const double wkk = w(k, k);
            const double old = b(k);
            const double z = s(k, j) - (g(k) - wkk * old);
            const double next = soft_threshold(z, lambda) / wkk;
            if (next != old) {
                const double delta = next - old;
                b(k) = next;
                g.noalias() += delta * w.col(k);
                max_step = std::max(max_step, wkk * std::abs(delta));
            }
        }
        if (max_step <= inner_tol) break;
    }
    for (Eigen::Index k = 0; k < p; ++k) {
        if (k == j) continue;
        w(k, j) = g(k);
        w(j, k) = g(k);
    }
}

// Primal iterate from the lasso coefficients: theta_jj = 1 / (w_jj - w_{-j,j}^T b),
// theta_{-j,j} = -b theta_jj. Returns false if some Schur complement is not positive.
bool assemble_theta(const Eigen::MatrixXd& w, const Eigen::MatrixXd& coef, Eigen::MatrixXd& theta) {
    const Eigen::Index p = w.rows();
    theta.resize(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double schur = w(j, j) - w.col(j).dot(coef.col(j));
        if (!(schur > 0.0)) return false;
        const double tjj = 1.0 / schur;
        theta.col(j) = -coef.col(j) * tjj;
        theta(j, j) = tjj;
    }
    return true;
}

} // namespace

MaxIterationsExceeded::MaxIterationsExceeded(GlassoSolution best)
    : Error("graphical_lasso: no certified solution after " + std::to_string(best.iterations) +
            " sweeps (best KKT residual " + std::to_string(best.kkt_residual) + ")"),
      best_(std::move(best)) {}

GlassoSolution graphical_lasso(const DenseSymMatrix& sigma_hat, double lambda,
                               const GlassoOptions& options) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidParameter("graphical_lasso: lambda must be finite and non-negative");
    }
    const Eigen::MatrixXd& s = sigma_hat.values();
    const Eigen::Index p = s.rows();
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!(s(i, i) > 0.0)) {
            throw InvalidParameter("graphical_lasso: covariance diagonal must be positive");
        }
    }

    double max_off = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = j + 1; i < p; ++i) {
            max_off = std::max(max_off, std::abs(s(i, j)));
        }
    }
    // largest shrink weight on the off-diagonal that stays within lambda of S
    const double keep = (max_off == 0.0 || lambda >= max_off) ? 0.0 : 1.0 - lambda / max_off;
    Eigen::MatrixXd w = keep * s;
    w.diagonal() = s.diagonal();
    if (!is_positive_definite(DenseSymMatrix::symmetrized(w))) {
        throw NotPositiveDefinite(
            "graphical_lasso: starting point is not positive definite (singular covariance with "
            "lambda == 0?)");
    }

    const double inner_tol = options.tol * 1e-3;
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd theta;

    GlassoSolution best{invert_spd(DenseSymMatrix::symmetrized(w)), DenseSymMatrix::symmetrized(w),
                        lambda, 0, std::numeric_limits<double>::infinity(), false};

    for (std::size_t sweep = 1; sweep <= options.max_iter; ++sweep) {
        for (Eigen::Index j = 0; j < p; ++j) {
            update_column(w, s, coef.col(j), j, lambda, inner_tol);
        }
        if (!assemble_theta(w, coef, theta)) continue;

        auto theta_sym = DenseSymMatrix::symmetrized(theta);
        double residual = std::numeric_limits<double>::infinity();
        try {
            residual = kkt_residual(theta_sym, sigma_hat, lambda);
        } catch (const NotPositiveDefinite&) {
            continue;
        }
        if (residual < best.kkt_residual) {
            best = GlassoSolution{std::move(theta_sym), DenseSymMatrix::symmetrized(w), lambda,
                                  sweep, residual, false};
        }
        if (residual <= options.tol) {
            best.iterations = sweep;
            best.certified = true;
            return best;
        }
    }
    best.iterations = options.max_iter;
    throw MaxIterationsExceeded(std::move(best));
}

double kkt_residual(const DenseSymMatrix& theta, const DenseSymMatrix& sigma_hat, double lambda) {
    if (theta.dim() != sigma_hat.dim()) {
        throw DimensionMismatch("kkt_residual: theta and covariance differ in dimension");
    }
    const DenseSymMatrix inv = invert_spd(theta);
    const Eigen::MatrixXd g = sigma_hat.values() - inv.values();
    const Eigen::Index p = g.rows();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = j; i < p; ++i) {
            double v = 0.0;
            if (i == j) {
                v = std::abs(g(i, i));
            } else if (theta(i, j) != 0.0) {
                v = std::abs(g(i, j) + (theta(i, j) > 0.0 ? lambda : -lambda));
            } else {
                v = std::max(0.0, std::abs(g(i, j)) - lambda);
            }
            worst = std::max(worst, v);
        }
    }
    return worst;
}

double glasso_objective(const DenseSymMatrix& theta, const DenseSymMatrix& sigma_hat,
                        double lambda) {
    if (theta.dim() != sigma_hat.dim()) {
        throw DimensionMismatch("glasso_objective: dimension mismatch");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(theta.values());
    if (llt.info() != Eigen::Success) {
        return std::numeric_limits<double>::infinity();
    }
    const Eigen::MatrixXd lower = llt.matrixL();
    const double log_det = 2.0 * lower.diagonal().array().log().sum();
    const double trace = (theta.values().cwiseProduct(sigma_hat.values())).sum();
    const double l1_off =
        theta.values().cwiseAbs().sum() - theta.values().diagonal().cwiseAbs().sum();
    return trace - log_det + lambda * l1_off;
}

} // namespace dice
