#ifndef ILLUMWAVE_LP_HPP
#define ILLUMWAVE_LP_HPP

#include <vector>

namespace ilw {

struct LpResult {
    bool feasible = false;
    std::vector<double> x;
    double objective = 0.0;
};

// Solves  min c.x  subject to  A x >= b,  x >= 0  with a dense two-phase
// simplex (Bland's rule). Sizes here are tiny: a handful of variables and a
// few hundred constraints.
LpResult lp_min(const std::vector<double>& c,
                const std::vector<std::vector<double>>& A,
                const std::vector<double>& b);

// One-parameter fit along a fixed nonnegative profile w: the smallest
// lambda >= 0 with (A (lambda*w))_k >= b_k for all k. Returns lambda, or a
// negative value when no finite lambda works (a row with b_k > 0 and
// (A w)_k == 0).
double fit_profile_lambda(const std::vector<std::vector<double>>& A,
                          const std::vector<double>& b,
                          const std::vector<double>& w);

}  // namespace ilw

#endif
