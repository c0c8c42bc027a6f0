#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "litho/core.hpp"

// Data-parallel inner loops used across the toolkit. Each kernel has a
// serial reference implementation and an OpenMP variant; the OpenMP
// variants write one output slot per iteration and accumulate each slot
// in the same order as the reference, so both produce bit-identical
// results at any thread count. The unqualified names dispatch on
// parallel::enabled(). tests/test_kernels.cpp pins the equality;
// bench/bench_kernels.cpp times the two sides.
namespace litho::kernels {

struct RollingStats {
    OptSeries mean;
    OptSeries stddev;      // population std over the window
    OptSeries border_diff; // newest - oldest
};

// Trailing-window statistics over bins [i-k+1, i]. A bin is missing when
// the window extends past the start of the series or contains any missing
// value.
namespace serial {
RollingStats rolling_stats(const OptSeries& x, std::size_t k);
}
namespace omp {
RollingStats rolling_stats(const OptSeries& x, std::size_t k);
}
RollingStats rolling_stats(const OptSeries& x, std::size_t k);

// ---------------------------------------------------------------------------
// Windowed 3-parameter linear least squares
// ---------------------------------------------------------------------------

struct Ls3Fit {
    std::array<double, 3> coef{};
    double residual_rms = 0.0;
    bool ok = false;
};

// Solves min_c ||y - [x0 x1 x2] c||_2 by normal equations with column
// equilibration. ok = false when the equilibrated Gram matrix has a
// condition estimate above cond_limit (rank-deficient window).
Ls3Fit ls3_solve(std::span<const double> x0, std::span<const double> x1,
                 std::span<const double> x2, std::span<const double> y,
                 double cond_limit);

struct Ls3Series {
    std::array<OptSeries, 3> coef;
    OptSeries residual_rms;
};

// Per-bin fits over trailing windows of m bins. Bins whose window has any
// missing input or a rank-deficient system come out missing.
namespace serial {
Ls3Series ls3_fit_windows(const OptSeries& x0, const OptSeries& x1, const OptSeries& x2,
                          const OptSeries& y, std::size_t m, double cond_limit);
}
namespace omp {
Ls3Series ls3_fit_windows(const OptSeries& x0, const OptSeries& x1, const OptSeries& x2,
                          const OptSeries& y, std::size_t m, double cond_limit);
}
Ls3Series ls3_fit_windows(const OptSeries& x0, const OptSeries& x1, const OptSeries& x2,
                          const OptSeries& y, std::size_t m, double cond_limit);

// ---------------------------------------------------------------------------
// Decision-tree split search
// ---------------------------------------------------------------------------

struct SplitCandidate {
    double gain = -1.0; // < 0: no valid split
    double threshold = 0.0;
    bool default_left = true; // side that receives missing values
    int feature = -1;
};

struct SplitScanInput {
    const std::vector<std::vector<double>>* values;         // [feature][row]
    const std::vector<std::vector<std::uint8_t>>* present;  // [feature][row]
    const std::vector<std::uint32_t>* rows;                 // rows in this node
    const std::vector<double>* grad;                        // per row, full table
    const std::vector<double>* hess;
    const std::vector<int>* features;                       // candidates, ascending
    std::size_t min_leaf = 1;
};

// Exhaustive scan over candidate features and thresholds maximizing the
// Newton gain G_L^2/H_L + G_R^2/H_R - G^2/H, trying missing values on
// either side. Ties break toward the lower feature id, then the smaller
// threshold, then default_left.
namespace serial {
SplitCandidate best_split(const SplitScanInput& in);
}
namespace omp {
SplitCandidate best_split(const SplitScanInput& in);
}
SplitCandidate best_split(const SplitScanInput& in);

// ---------------------------------------------------------------------------
// Dense affine layers (row-major)
// ---------------------------------------------------------------------------

// Y[i,j] = b[j] + sum_k X[i,k] W[k,j]
namespace serial {
void affine_forward(std::span<const double> X, std::size_t n, std::size_t din,
                    std::span<const double> W, std::span<const double> b, std::size_t dout,
                    std::span<double> Y);
void affine_backward_weights(std::span<const double> X, std::size_t n, std::size_t din,
                             std::span<const double> delta, std::size_t dout,
                             std::span<double> gW, std::span<double> gb);
void affine_backward_inputs(std::span<const double> delta, std::size_t n, std::size_t dout,
                            std::span<const double> W, std::size_t din, std::span<double> gX);
}
namespace omp {
void affine_forward(std::span<const double> X, std::size_t n, std::size_t din,
                    std::span<const double> W, std::span<const double> b, std::size_t dout,
                    std::span<double> Y);
void affine_backward_weights(std::span<const double> X, std::size_t n, std::size_t din,
                             std::span<const double> delta, std::size_t dout,
                             std::span<double> gW, std::span<double> gb);
void affine_backward_inputs(std::span<const double> delta, std::size_t n, std::size_t dout,
                            std::span<const double> W, std::size_t din, std::span<double> gX);
}
void affine_forward(std::span<const double> X, std::size_t n, std::size_t din,
                    std::span<const double> W, std::span<const double> b, std::size_t dout,
                    std::span<double> Y);
void affine_backward_weights(std::span<const double> X, std::size_t n, std::size_t din,
                             std::span<const double> delta, std::size_t dout,
                             std::span<double> gW, std::span<double> gb);
void affine_backward_inputs(std::span<const double> delta, std::size_t n, std::size_t dout,
                            std::span<const double> W, std::size_t din, std::span<double> gX);

} // namespace litho::kernels
