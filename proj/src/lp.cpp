#include "illumwave/lp.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

namespace ilw {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;

struct Tableau {
    size_t m = 0, n = 0;                    // rows, total columns
    std::vector<std::vector<double>> t;     // m x n
    std::vector<double> rhs;                // m, kept >= 0
    std::vector<int> basis;                 // m, column index of basic variable

    void pivot(size_t row, size_t col) {
        double p = t[row][col];
        for (size_t j = 0; j < n; ++j) t[row][j] /= p;
        rhs[row] /= p;
        for (size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            double f = t[i][col];
            if (f == 0.0) continue;
            for (size_t j = 0; j < n; ++j) t[i][j] -= f * t[row][j];
            rhs[i] -= f * rhs[row];
        }
        basis[row] = int(col);
    }
};

// Minimizes cost over the tableau with Bland's rule; `allowed` masks columns
// that may enter. Returns false only on iteration blowout.
bool run_simplex(Tableau& tb, const std::vector<double>& cost,
                 const std::vector<char>& allowed) {
    for (int iter = 0; iter < 20000; ++iter) {
        // reduced costs from scratch: sizes are small
        int enter = -1;
        for (size_t j = 0; j < tb.n; ++j) {
            if (!allowed[j]) continue;
            double r = cost[j];
            for (size_t i = 0; i < tb.m; ++i) {
                int bj = tb.basis[i];
                if (cost[size_t(bj)] != 0.0) r -= cost[size_t(bj)] * tb.t[i][j];
            }
            if (r < -kCostTol) { enter = int(j); break; }  // Bland: lowest index
        }
        if (enter < 0) return true;
        int leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < tb.m; ++i) {
            double a = tb.t[i][size_t(enter)];
            if (a > kPivotTol) {
                double ratio = tb.rhs[i] / a;
                if (ratio < best - 1e-15 ||
                    (std::abs(ratio - best) <= 1e-15 &&
                     (leave < 0 || tb.basis[i] < tb.basis[size_t(leave)]))) {
                    best = ratio;
                    leave = int(i);
                }
            }
        }
        if (leave < 0) return true;  // unbounded; caller's problems are bounded
        tb.pivot(size_t(leave), size_t(enter));
    }
    return false;
}

}  // namespace

LpResult lp_min(const std::vector<double>& c,
                const std::vector<std::vector<double>>& A,
                const std::vector<double>& b) {
    size_t m = A.size(), n = c.size();
    LpResult res;
    if (m == 0) {
        res.feasible = true;
        res.x.assign(n, 0.0);
        return res;
    }

    // columns: [x (n)] [surplus (m)] [artificials (appended as needed)]
    size_t n_art = 0;
    for (size_t k = 0; k < m; ++k)
        if (b[k] > 0.0) ++n_art;

    Tableau tb;
    tb.m = m;
    tb.n = n + m + n_art;
    tb.t.assign(m, std::vector<double>(tb.n, 0.0));
    tb.rhs.assign(m, 0.0);
    tb.basis.assign(m, -1);

    size_t art = n + m;
    for (size_t k = 0; k < m; ++k) {
        if (b[k] > 0.0) {
            // A x - s + art = b
            for (size_t j = 0; j < n; ++j) tb.t[k][j] = A[k][j];
            tb.t[k][n + k] = -1.0;
            tb.t[k][art] = 1.0;
            tb.rhs[k] = b[k];
            tb.basis[k] = int(art);
            ++art;
        } else {
            // -A x + s = -b  (slack basic)
            for (size_t j = 0; j < n; ++j) tb.t[k][j] = -A[k][j];
            tb.t[k][n + k] = 1.0;
            tb.rhs[k] = -b[k];
            tb.basis[k] = int(n + k);
        }
    }

    std::vector<char> allowed(tb.n, 1);
    if (n_art > 0) {
        std::vector<double> phase1(tb.n, 0.0);
        for (size_t j = n + m; j < tb.n; ++j) phase1[j] = 1.0;
        if (!run_simplex(tb, phase1, allowed)) return res;
        double p1 = 0.0;
        for (size_t i = 0; i < m; ++i)
            if (tb.basis[i] >= int(n + m)) p1 += tb.rhs[i];
        double scale = 1.0;
        for (size_t k = 0; k < m; ++k) scale = std::max(scale, std::abs(b[k]));
        if (p1 > 1e-7 * scale) return res;  // infeasible
        // drive any zero-level artificials out of the basis
        for (size_t i = 0; i < m; ++i) {
            if (tb.basis[i] < int(n + m)) continue;
            for (size_t j = 0; j < n + m; ++j) {
                if (std::abs(tb.t[i][j]) > kPivotTol) {
                    tb.pivot(i, j);
                    break;
                }
            }
        }
        for (size_t j = n + m; j < tb.n; ++j) allowed[j] = 0;
    }

    std::vector<double> phase2(tb.n, 0.0);
    for (size_t j = 0; j < n; ++j) phase2[j] = c[j];
    if (!run_simplex(tb, phase2, allowed)) return res;

    res.feasible = true;
    res.x.assign(n, 0.0);
    for (size_t i = 0; i < m; ++i)
        if (tb.basis[i] >= 0 && tb.basis[i] < int(n)) res.x[size_t(tb.basis[i])] = tb.rhs[i];
    res.objective = 0.0;
    for (size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
    return res;
}

double fit_profile_lambda(const std::vector<std::vector<double>>& A,
                          const std::vector<double>& b,
                          const std::vector<double>& w) {
    double lambda = 0.0;
    for (size_t k = 0; k < A.size(); ++k) {
        double aw = 0.0;
        for (size_t j = 0; j < w.size(); ++j) aw += A[k][j] * w[j];
        if (b[k] <= 0.0) continue;
        if (aw <= 0.0) return -1.0;
        lambda = std::max(lambda, b[k] / aw);
    }
    return lambda;
}

}  // namespace ilw
