// Timing harness comparing the serial reference kernels against their
// OpenMP variants. Build target: bench_kernels. The parallel variants are
// bit-identical to the references by construction; this binary reports the
// speedups (and re-checks equality on the benchmark inputs).

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <omp.h>

#include "litho/kernels.hpp"
#include "litho/parallel.hpp"

using namespace litho;

namespace {

OptSeries random_series(std::size_t n, double missing_rate, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_real_distribution<double> m(0.0, 1.0);
    OptSeries s(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (m(rng) >= missing_rate) s.set(i, u(rng));
    }
    return s;
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

void report(const std::string& name, double serial_s, double parallel_s, bool equal) {
    std::printf("%-28s serial %9.4f ms   omp %9.4f ms   speedup %5.2fx   %s\n", name.c_str(),
                serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                equal ? "bitwise-equal" : "MISMATCH");
}

bool series_equal(const OptSeries& a, const OptSeries& b) {
    if (a.present != b.present) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.has(i) && a.value[i] != b.value[i]) return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 5;
    parallel::set_jobs(0);
    std::printf("threads available: %d\n", omp_get_max_threads());

    {
        const std::size_t n = 400000;
        const OptSeries x = random_series(n, 0.02, 1);
        kernels::RollingStats rs, ro;
        const double ts = time_best_of(reps, [&] { rs = kernels::serial::rolling_stats(x, 10); });
        const double tp = time_best_of(reps, [&] { ro = kernels::omp::rolling_stats(x, 10); });
        report("rolling_stats n=400k k=10", ts, tp,
               series_equal(rs.mean, ro.mean) && series_equal(rs.stddev, ro.stddev) &&
                   series_equal(rs.border_diff, ro.border_diff));
    }

    {
        const std::size_t n = 60000;
        OptSeries x0 = random_series(n, 0.01, 2);
        OptSeries x1 = random_series(n, 0.01, 3);
        OptSeries x2(n);
        for (std::size_t i = 0; i < n; ++i) x2.set(i, 1.0);
        OptSeries y = random_series(n, 0.01, 4);
        kernels::Ls3Series fs, fo;
        const double ts =
            time_best_of(reps, [&] { fs = kernels::serial::ls3_fit_windows(x0, x1, x2, y, 8, 1e12); });
        const double tp =
            time_best_of(reps, [&] { fo = kernels::omp::ls3_fit_windows(x0, x1, x2, y, 8, 1e12); });
        bool equal = series_equal(fs.residual_rms, fo.residual_rms);
        for (int p = 0; p < 3; ++p)
            equal = equal && series_equal(fs.coef[static_cast<std::size_t>(p)],
                                          fo.coef[static_cast<std::size_t>(p)]);
        report("ls3_fit_windows n=60k m=8", ts, tp, equal);
    }

    {
        const std::size_t n = 20000, d = 64;
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<std::vector<double>> values(d, std::vector<double>(n));
        std::vector<std::vector<std::uint8_t>> present(d, std::vector<std::uint8_t>(n, 1));
        std::vector<double> grad(n), hess(n);
        for (std::size_t c = 0; c < d; ++c)
            for (std::size_t r = 0; r < n; ++r) {
                values[c][r] = u(rng);
                if (u(rng) < 0.05) present[c][r] = 0;
            }
        for (std::size_t r = 0; r < n; ++r) {
            grad[r] = u(rng) - 0.5;
            hess[r] = 0.05 + u(rng);
        }
        std::vector<std::uint32_t> rows(n);
        for (std::size_t r = 0; r < n; ++r) rows[r] = static_cast<std::uint32_t>(r);
        std::vector<int> feats(d);
        for (std::size_t c = 0; c < d; ++c) feats[c] = static_cast<int>(c);
        kernels::SplitScanInput in;
        in.values = &values;
        in.present = &present;
        in.rows = &rows;
        in.grad = &grad;
        in.hess = &hess;
        in.features = &feats;
        in.min_leaf = 20;
        kernels::SplitCandidate cs, co;
        const double ts = time_best_of(reps, [&] { cs = kernels::serial::best_split(in); });
        const double tp = time_best_of(reps, [&] { co = kernels::omp::best_split(in); });
        report("best_split n=20k d=64", ts, tp,
               cs.feature == co.feature && cs.threshold == co.threshold && cs.gain == co.gain &&
                   cs.default_left == co.default_left);
    }

    {
        const std::size_t n = 2000, din = 128, dout = 256;
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<double> X(n * din), W(din * dout), b(dout), delta(n * dout);
        for (double& v : X) v = u(rng);
        for (double& v : W) v = u(rng);
        for (double& v : b) v = u(rng);
        for (double& v : delta) v = u(rng);
        std::vector<double> Ys(n * dout), Yo(n * dout);
        const double ts = time_best_of(
            reps, [&] { kernels::serial::affine_forward(X, n, din, W, b, dout, Ys); });
        const double tp =
            time_best_of(reps, [&] { kernels::omp::affine_forward(X, n, din, W, b, dout, Yo); });
        report("affine_forward 2000x128x256", ts, tp, Ys == Yo);

        std::vector<double> gWs(din * dout), gWo(din * dout), gbs(dout), gbo(dout);
        const double tbs = time_best_of(reps, [&] {
            kernels::serial::affine_backward_weights(X, n, din, delta, dout, gWs, gbs);
        });
        const double tbp = time_best_of(
            reps, [&] { kernels::omp::affine_backward_weights(X, n, din, delta, dout, gWo, gbo); });
        report("affine_backward_weights", tbs, tbp, gWs == gWo && gbs == gbo);
    }

    return 0;
}
