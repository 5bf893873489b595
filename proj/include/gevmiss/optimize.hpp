#pragma once

#include <Eigen/Dense>
#include <functional>

namespace gevmiss::optim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Objective to minimise; may return +inf for infeasible points.
using Objective = std::function<double(const Vector&)>;

struct NelderMeadOptions {
  double rel_ftol = 1e-10;
  int max_iter = 2000;
  int restarts = 1;
};

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex minimisation. The initial simplex is `start` plus
/// one vertex per coordinate displaced by `steps[j]`. On convergence the
/// search is restarted from the incumbent `restarts` times.
NelderMeadResult nelder_mead(const Objective& f, const Vector& start, const Vector& steps,
                             const NelderMeadOptions& opts = {});

/// Central-difference gradient with steps h_j. Entries are NaN when an
/// evaluation is not finite.
Vector numeric_gradient(const Objective& f, const Vector& x, const Vector& h);
/// Central-difference Hessian with steps h_j; NaN entries as above.
Matrix numeric_hessian(const Objective& f, const Vector& x, const Vector& h);

/// Relative steps h_j = scale * (1 + |x_j|).
Vector relative_steps(const Vector& x, double scale);

/// Newton refinement of a minimum found by a derivative-free search, using
/// numeric derivatives with relative step `step_scale`. Steps are halved
/// until the objective does not increase; stops silently if the Hessian is
/// not positive definite. Returns the refined point.
Vector newton_polish(const Objective& f, Vector x, double step_scale = 1e-5, int max_iter = 6);

}  // namespace gevmiss::optim
