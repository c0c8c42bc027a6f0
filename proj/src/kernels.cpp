#include "litho/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "litho/parallel.hpp"

namespace litho::kernels {

namespace {

// ---- rolling stats -------------------------------------------------------

// One output bin; identical arithmetic on both execution paths.
inline void rolling_slot(const OptSeries& x, std::size_t k, std::size_t i, RollingStats& out) {
    if (i + 1 < k) return;
    const std::size_t lo = i + 1 - k;
    for (std::size_t j = lo; j <= i; ++j) {
        if (!x.has(j)) return;
    }
    double sum = 0.0;
    for (std::size_t j = lo; j <= i; ++j) sum += x.value[j];
    const double mean = sum / static_cast<double>(k);
    double s2 = 0.0;
    for (std::size_t j = lo; j <= i; ++j) {
        const double d = x.value[j] - mean;
        s2 += d * d;
    }
    out.mean.set(i, mean);
    out.stddev.set(i, std::sqrt(s2 / static_cast<double>(k)));
    out.border_diff.set(i, x.value[i] - x.value[lo]);
}

// ---- windowed least squares ----------------------------------------------

inline bool window_complete(const OptSeries& x0, const OptSeries& x1, const OptSeries& x2,
                            const OptSeries& y, std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j <= hi; ++j) {
        if (!x0.has(j) || !x1.has(j) || !x2.has(j) || !y.has(j)) return false;
    }
    return true;
}

inline void ls3_slot(const OptSeries& x0, const OptSeries& x1, const OptSeries& x2,
                     const OptSeries& y, std::size_t m, double cond_limit, std::size_t i,
                     Ls3Series& out) {
    if (i + 1 < m) return;
    const std::size_t lo = i + 1 - m;
    if (!window_complete(x0, x1, x2, y, lo, i)) return;
    std::vector<double> a(m), b(m), c(m), t(m);
    for (std::size_t j = 0; j < m; ++j) {
        a[j] = x0.value[lo + j];
        b[j] = x1.value[lo + j];
        c[j] = x2.value[lo + j];
        t[j] = y.value[lo + j];
    }
    const Ls3Fit fit = ls3_solve(a, b, c, t, cond_limit);
    if (!fit.ok) return;
    for (std::size_t p = 0; p < 3; ++p) out.coef[p].set(i, fit.coef[p]);
    out.residual_rms.set(i, fit.residual_rms);
}

// ---- split scan ------------------------------------------------------------

// Best split for a single feature; deterministic given node row order.
SplitCandidate scan_feature(const SplitScanInput& in, int feature) {
    const auto& vals = (*in.values)[static_cast<std::size_t>(feature)];
    const auto& pres = (*in.present)[static_cast<std::size_t>(feature)];
    const auto& rows = *in.rows;
    const auto& g = *in.grad;
    const auto& h = *in.hess;

    double g_all = 0.0, h_all = 0.0;
    double g_miss = 0.0, h_miss = 0.0;
    std::size_t n_miss = 0;
    std::vector<std::uint32_t> order;
    order.reserve(rows.size());
    for (std::uint32_t r : rows) {
        g_all += g[r];
        h_all += h[r];
        if (pres[r]) {
            order.push_back(r);
        } else {
            g_miss += g[r];
            h_miss += h[r];
            ++n_miss;
        }
    }
    SplitCandidate best;
    best.feature = feature;
    if (order.size() < 2) return best;

    std::sort(order.begin(), order.end(), [&](std::uint32_t lhs, std::uint32_t rhs) {
        if (vals[lhs] != vals[rhs]) return vals[lhs] < vals[rhs];
        return lhs < rhs;
    });

    constexpr double kHessFloor = 1e-12;
    const double parent = g_all * g_all / std::max(h_all, kHessFloor);
    const std::size_t n_all = rows.size();

    double cum_g = 0.0, cum_h = 0.0;
    for (std::size_t t = 0; t + 1 < order.size(); ++t) {
        cum_g += g[order[t]];
        cum_h += h[order[t]];
        const double v = vals[order[t]];
        const double v_next = vals[order[t + 1]];
        if (v == v_next) continue;
        const double thr = v + 0.5 * (v_next - v);
        const std::size_t n_pres_left = t + 1;
        for (int side = 0; side < 2; ++side) {
            const bool miss_left = (side == 0);
            const double gl = cum_g + (miss_left ? g_miss : 0.0);
            const double hl = cum_h + (miss_left ? h_miss : 0.0);
            const std::size_t nl = n_pres_left + (miss_left ? n_miss : 0);
            const std::size_t nr = n_all - nl;
            if (nl < in.min_leaf || nr < in.min_leaf) continue;
            const double gr = g_all - gl;
            const double hr = h_all - hl;
            if (hl < kHessFloor || hr < kHessFloor) continue;
            const double gain = gl * gl / hl + gr * gr / hr - parent;
            if (gain > best.gain) {
                best.gain = gain;
                best.threshold = thr;
                best.default_left = miss_left;
            }
        }
    }
    return best;
}

inline SplitCandidate reduce_candidates(const std::vector<SplitCandidate>& cands) {
    SplitCandidate best;
    for (const SplitCandidate& c : cands) {
        if (c.gain > best.gain) best = c;
    }
    return best;
}

// ---- affine slots ----------------------------------------------------------

inline void forward_row(std::span<const double> X, std::size_t din, std::span<const double> W,
                        std::span<const double> b, std::size_t dout, std::span<double> Y,
                        std::size_t i) {
    const double* xi = X.data() + i * din;
    double* yi = Y.data() + i * dout;
    for (std::size_t j = 0; j < dout; ++j) yi[j] = b[j];
    for (std::size_t k = 0; k < din; ++k) {
        const double xv = xi[k];
        const double* wk = W.data() + k * dout;
        for (std::size_t j = 0; j < dout; ++j) yi[j] += xv * wk[j];
    }
}

inline void backward_weight_row(std::span<const double> X, std::size_t n, std::size_t din,
                                std::span<const double> delta, std::size_t dout,
                                std::span<double> gW, std::size_t k) {
    double* gk = gW.data() + k * dout;
    std::fill(gk, gk + dout, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double xv = X[i * din + k];
        const double* di = delta.data() + i * dout;
        for (std::size_t j = 0; j < dout; ++j) gk[j] += xv * di[j];
    }
}

inline void backward_input_row(std::span<const double> delta, std::size_t dout,
                               std::span<const double> W, std::size_t din, std::span<double> gX,
                               std::size_t i) {
    const double* di = delta.data() + i * dout;
    double* gi = gX.data() + i * din;
    for (std::size_t k = 0; k < din; ++k) {
        const double* wk = W.data() + k * dout;
        double acc = 0.0;
        for (std::size_t j = 0; j < dout; ++j) acc += di[j] * wk[j];
        gi[k] = acc;
    }
}

} // namespace

// ---------------------------------------------------------------------------

Ls3Fit ls3_solve(std::span<const double> x0, std::span<const double> x1,
                 std::span<const double> x2, std::span<const double> y, double cond_limit) {
    Ls3Fit fit;
    const std::size_t m = y.size();
    if (m < 3 || x0.size() != m || x1.size() != m || x2.size() != m) return fit;

    const std::span<const double> cols[3] = {x0, x1, x2};
    double scale[3];
    for (int j = 0; j < 3; ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < m; ++i) ss += cols[j][i] * cols[j][i];
        const double norm = std::sqrt(ss);
        scale[j] = norm > 0.0 ? 1.0 / norm : 1.0;
    }

    Eigen::Matrix3d gram;
    Eigen::Vector3d rhs;
    for (int j = 0; j < 3; ++j) {
        for (int k = j; k < 3; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += cols[j][i] * cols[k][i];
            gram(j, k) = gram(k, j) = s * scale[j] * scale[k];
        }
        double r = 0.0;
        for (std::size_t i = 0; i < m; ++i) r += cols[j][i] * y[i];
        rhs(j) = r * scale[j];
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gram);
    const Eigen::Vector3d lam = eig.eigenvalues();
    const double lam_min = lam(0);
    const double lam_max = lam(2);
    if (!(lam_min > 0.0) || lam_max / lam_min > cond_limit) return fit;

    const Eigen::Vector3d z = eig.eigenvectors().transpose() * rhs;
    const Eigen::Vector3d c_scaled = eig.eigenvectors() * (z.array() / lam.array()).matrix();
    for (int j = 0; j < 3; ++j) fit.coef[j] = c_scaled(j) * scale[j];

    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double pred = fit.coef[0] * x0[i] + fit.coef[1] * x1[i] + fit.coef[2] * x2[i];
        const double e = y[i] - pred;
        rss += e * e;
    }
    fit.residual_rms = std::sqrt(rss / static_cast<double>(m));
    fit.ok = true;
    return fit;
}

namespace serial {

RollingStats rolling_stats(const OptSeries& x, std::size_t k) {
    const std::size_t n = x.size();
    RollingStats out{OptSeries(n), OptSeries(n), OptSeries(n)};
    for (std::size_t i = 0; i < n; ++i) rolling_slot(x, k, i, out);
    return out;
}

Ls3Series ls3_fit_windows(const OptSeries& x0, const OptSeries& x1, const OptSeries& x2,
                          const OptSeries& y, std::size_t m, double cond_limit) {
    const std::size_t n = y.size();
    Ls3Series out{{OptSeries(n), OptSeries(n), OptSeries(n)}, OptSeries(n)};
    for (std::size_t i = 0; i < n; ++i) ls3_slot(x0, x1, x2, y, m, cond_limit, i, out);
    return out;
}

SplitCandidate best_split(const SplitScanInput& in) {
    std::vector<SplitCandidate> cands(in.features->size());
    for (std::size_t f = 0; f < in.features->size(); ++f) {
        cands[f] = scan_feature(in, (*in.features)[f]);
    }
    return reduce_candidates(cands);
}

void affine_forward(std::span<const double> X, std::size_t n, std::size_t din,
                    std::span<const double> W, std::span<const double> b, std::size_t dout,
                    std::span<double> Y) {
    for (std::size_t i = 0; i < n; ++i) forward_row(X, din, W, b, dout, Y, i);
}

void affine_backward_weights(std::span<const double> X, std::size_t n, std::size_t din,
                             std::span<const double> delta, std::size_t dout,
                             std::span<double> gW, std::span<double> gb) {
    if (dout == 1) {
        // Row-major accumulation keeps X reads sequential. Each gW slot still
        // sums over rows in ascending order, matching the parallel variant.
        std::fill(gW.begin(), gW.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = delta[i];
            const double* xi = X.data() + i * din;
            for (std::size_t k = 0; k < din; ++k) gW[k] += xi[k] * d;
        }
    } else {
        for (std::size_t k = 0; k < din; ++k) backward_weight_row(X, n, din, delta, dout, gW, k);
    }
    for (std::size_t j = 0; j < dout; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += delta[i * dout + j];
        gb[j] = acc;
    }
}

void affine_backward_inputs(std::span<const double> delta, std::size_t n, std::size_t dout,
                            std::span<const double> W, std::size_t din, std::span<double> gX) {
    for (std::size_t i = 0; i < n; ++i) backward_input_row(delta, dout, W, din, gX, i);
}

} // namespace serial

namespace omp {

RollingStats rolling_stats(const OptSeries& x, std::size_t k) {
    const std::size_t n = x.size();
    RollingStats out{OptSeries(n), OptSeries(n), OptSeries(n)};
    parallel::parallel_for(n, [&](std::size_t i) { rolling_slot(x, k, i, out); });
    return out;
}

Ls3Series ls3_fit_windows(const OptSeries& x0, const OptSeries& x1, const OptSeries& x2,
                          const OptSeries& y, std::size_t m, double cond_limit) {
    const std::size_t n = y.size();
    Ls3Series out{{OptSeries(n), OptSeries(n), OptSeries(n)}, OptSeries(n)};
    parallel::parallel_for(n, [&](std::size_t i) { ls3_slot(x0, x1, x2, y, m, cond_limit, i, out); });
    return out;
}

SplitCandidate best_split(const SplitScanInput& in) {
    std::vector<SplitCandidate> cands(in.features->size());
    parallel::parallel_for(in.features->size(),
                           [&](std::size_t f) { cands[f] = scan_feature(in, (*in.features)[f]); });
    return reduce_candidates(cands);
}

void affine_forward(std::span<const double> X, std::size_t n, std::size_t din,
                    std::span<const double> W, std::span<const double> b, std::size_t dout,
                    std::span<double> Y) {
    parallel::parallel_for(n, [&](std::size_t i) { forward_row(X, din, W, b, dout, Y, i); });
}

void affine_backward_weights(std::span<const double> X, std::size_t n, std::size_t din,
                             std::span<const double> delta, std::size_t dout,
                             std::span<double> gW, std::span<double> gb) {
    parallel::parallel_for(din,
                           [&](std::size_t k) { backward_weight_row(X, n, din, delta, dout, gW, k); });
    for (std::size_t j = 0; j < dout; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += delta[i * dout + j];
        gb[j] = acc;
    }
}

void affine_backward_inputs(std::span<const double> delta, std::size_t n, std::size_t dout,
                            std::span<const double> W, std::size_t din, std::span<double> gX) {
    parallel::parallel_for(n, [&](std::size_t i) { backward_input_row(delta, dout, W, din, gX, i); });
}

} // namespace omp

RollingStats rolling_stats(const OptSeries& x, std::size_t k) {
    return parallel::enabled() ? omp::rolling_stats(x, k) : serial::rolling_stats(x, k);
}

Ls3Series ls3_fit_windows(const OptSeries& x0, const OptSeries& x1, const OptSeries& x2,
                          const OptSeries& y, std::size_t m, double cond_limit) {
    return parallel::enabled() ? omp::ls3_fit_windows(x0, x1, x2, y, m, cond_limit)
                               : serial::ls3_fit_windows(x0, x1, x2, y, m, cond_limit);
}

SplitCandidate best_split(const SplitScanInput& in) {
    return parallel::enabled() ? omp::best_split(in) : serial::best_split(in);
}

void affine_forward(std::span<const double> X, std::size_t n, std::size_t din,
                    std::span<const double> W, std::span<const double> b, std::size_t dout,
                    std::span<double> Y) {
    if (parallel::enabled()) {
        omp::affine_forward(X, n, din, W, b, dout, Y);
    } else {
        serial::affine_forward(X, n, din, W, b, dout, Y);
    }
}

void affine_backward_weights(std::span<const double> X, std::size_t n, std::size_t din,
                             std::span<const double> delta, std::size_t dout,
                             std::span<double> gW, std::span<double> gb) {
    if (parallel::enabled()) {
        omp::affine_backward_weights(X, n, din, delta, dout, gW, gb);
    } else {
        serial::affine_backward_weights(X, n, din, delta, dout, gW, gb);
    }
}

void affine_backward_inputs(std::span<const double> delta, std::size_t n, std::size_t dout,
                            std::span<const double> W, std::size_t din, std::span<double> gX) {
    if (parallel::enabled()) {
        omp::affine_backward_inputs(delta, n, dout, W, din, gX);
    } else {
        serial::affine_backward_inputs(delta, n, dout, W, din, gX);
    }
}

} // namespace litho::kernels
