#pragma once

#include <cstddef>

#include "dice/errors.hpp"
#include "dice/matrix.hpp"

namespace dice {

struct GlassoOptions {
    /// Stop once kkt_residual drops to this value.
    double tol = 1e-5;
    /// Cap on full column sweeps.
    std::size_t max_iter = 200;
};

struct GlassoSolution {
    DenseSymMatrix theta_hat;
    /// Covariance-side iterate; equals the inverse of theta_hat at convergence.
    DenseSymMatrix w;
    double lambda = 0.0;
    std::size_t iterations = 0;
    double kkt_residual = 0.0;
    bool certified = false;
};

/// Thrown when the sweep cap is reached. Carries the iterate with the smallest
/// KKT residual seen, marked as not certified.
class MaxIterationsExceeded : public Error {
public:
    explicit MaxIterationsExceeded(GlassoSolution best);
    const GlassoSolution& best() const noexcept { return best_; }

private:
    GlassoSolution best_;
};

/**
 * Minimises tr(Theta S) - log det Theta + lambda * sum_{i != j} |Theta_ij|
 * over positive definite Theta. The diagonal is not penalised.
 *
 * Block coordinate descent on the covariance-side matrix W: each sweep visits
 * every column j and solves the lasso
 *     min_b  1/2 b^T W_{-j,-j} b - b^T S_{-j,j} + lambda ||b||_1
 * by cyclic coordinate descent, then sets W_{-j,j} = W_{-j,-j} b. The diagonal
 * of W stays pinned at diag(S). W starts at c S + (1 - c) diag(S) with the
 * largest c in [0, 1] that keeps |W - S| <= lambda off the diagonal; this is
 * positive definite whenever lambda > 0 or S is, and each column update keeps
 * it so. Convergence is checked after each sweep through kkt_residual.
 *
 * Requires diag(S) > 0 and lambda >= 0; lambda == 0 additionally requires S
 * positive definite (NotPositiveDefinite otherwise).
 */
GlassoSolution graphical_lasso(const DenseSymMatrix& sigma_hat, double lambda,
                               const GlassoOptions& options = {});

/**
 * Largest violation of the stationarity conditions at theta, with
 * G = S - theta^{-1}: |G_ii| on the diagonal, |G_ij + lambda sign(theta_ij)|
 * where theta_ij != 0, and max(0, |G_ij| - lambda) where theta_ij == 0.
 */
double kkt_residual(const DenseSymMatrix& theta, const DenseSymMatrix& sigma_hat, double lambda);

/// Penalised objective; +inf when theta is not positive definite.
double glasso_objective(const DenseSymMatrix& theta, const DenseSymMatrix& sigma_hat,
                        double lambda);

} // namespace dice
