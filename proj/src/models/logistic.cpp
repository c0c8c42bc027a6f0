#include "litho/models/logistic.hpp"

#include <cmath>

#include "litho/kernels.hpp"

namespace litho::models {

namespace {

// Stable mean negative log-likelihood: log(1+exp(eta)) - y*eta.
double mean_nll(std::span<const double> eta, std::span<const std::uint8_t> y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double e = eta[i];
        const double soft = e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
        sum += soft - (y[i] ? e : 0.0);
    }
    return sum / static_cast<double>(eta.size());
}

} // namespace

void LogisticModel::fit(const features::FeatureMatrix& m) {
    require_both_classes(m, family());
    prep_ = DensePrep::fit(m);
    const std::vector<double> X = prep_.transform(m);
    const std::size_t n = m.n_rows();
    const std::size_t dd = prep_.dense_dim();
    const double lambda = params_.l2_penalty;

    weights_.assign(dd, 0.0);
    bias_ = 0.0;
    converged_ = false;

    std::vector<double> eta(n), resid(n), grad_w(dd), gb(1);
    std::vector<double> trial_w(dd), trial_eta(n);

    auto compute_eta = [&](const std::vector<double>& w, double b, std::vector<double>& out) {
        kernels::affine_forward(X, n, dd, w, std::span<const double>(&b, 1), 1, out);
    };

    auto objective = [&](const std::vector<double>& w, const std::vector<double>& e) {
        double pen = 0.0;
        for (double wi : w) pen += wi * wi;
        std::span<const std::uint8_t> y(m.target);
        return mean_nll(e, y) + 0.5 * lambda * pen;
    };

    compute_eta(weights_, bias_, eta);
    double J = objective(weights_, eta);
    double step_scale = 1.0; // warm start across iterations

    for (iterations_ = 0; iterations_ < params_.max_iters; ++iterations_) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) resid[i] = (sigmoid(eta[i]) - (m.target[i] ? 1.0 : 0.0)) * inv_n;
        kernels::affine_backward_weights(X, n, dd, resid, 1, grad_w, gb);
        for (std::size_t j = 0; j < dd; ++j) grad_w[j] += lambda * weights_[j];
        const double grad_b = gb[0];

        double gmax = std::abs(grad_b);
        double gnorm2 = grad_b * grad_b;
        for (double g : grad_w) {
            gmax = std::max(gmax, std::abs(g));
            gnorm2 += g * g;
        }
        if (gmax < params_.grad_tol) {
            converged_ = true;
            break;
        }

        // Backtracking line search along -grad (Armijo, c = 1e-4), warm
        // started from the previously accepted step.
        double step = std::min(step_scale * 2.0, 1024.0);
        bool accepted = false;
        while (step > 1e-20) {
            for (std::size_t j = 0; j < dd; ++j) trial_w[j] = weights_[j] - step * grad_w[j];
            const double trial_b = bias_ - step * grad_b;
            compute_eta(trial_w, trial_b, trial_eta);
            const double Jt = objective(trial_w, trial_eta);
            if (Jt <= J - 1e-4 * step * gnorm2) {
                weights_.swap(trial_w);
                bias_ = trial_b;
                eta.swap(trial_eta);
                J = Jt;
                accepted = true;
                step_scale = step;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // no descent possible at double precision
    }
}

std::vector<double> LogisticModel::predict_proba(const features::FeatureMatrix& m) const {
    const std::vector<double> X = prep_.transform(m);
    const std::size_t n = m.n_rows();
    std::vector<double> eta(n);
    kernels::affine_forward(X, n, prep_.dense_dim(), weights_,
                            std::span<const double>(&bias_, 1), 1, eta);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = sigmoid(eta[i]);
    return p;
}

nlohmann::json LogisticModel::save_header(std::vector<double>& blob) const {
    nlohmann::json j;
    j["schema"] = prep_.schema;
    j["params"] = {{"l2_penalty", params_.l2_penalty},
                   {"max_iters", params_.max_iters},
                   {"grad_tol", params_.grad_tol}};
    j["iterations"] = iterations_;
    j["converged"] = converged_;
    blob.insert(blob.end(), weights_.begin(), weights_.end());
    blob.push_back(bias_);
    blob.insert(blob.end(), prep_.impute_mean.begin(), prep_.impute_mean.end());
    blob.insert(blob.end(), prep_.center.begin(), prep_.center.end());
    blob.insert(blob.end(), prep_.scale.begin(), prep_.scale.end());
    return j;
}

void LogisticModel::load(const nlohmann::json& header, std::span<const double> blob) {
    prep_.schema = header.at("schema").get<std::vector<std::string>>();
    params_.l2_penalty = header.at("params").at("l2_penalty").get<double>();
    params_.max_iters = header.at("params").at("max_iters").get<std::size_t>();
    params_.grad_tol = header.at("params").at("grad_tol").get<double>();
    iterations_ = header.at("iterations").get<std::size_t>();
    converged_ = header.at("converged").get<bool>();
    const std::size_t d = prep_.schema.size();
    const std::size_t dd = 2 * d;
    std::size_t pos = 0;
    auto take = [&](std::size_t k) {
        if (pos + k > blob.size()) throw DataError("logistic model blob truncated");
        auto s = blob.subspan(pos, k);
        pos += k;
        return std::vector<double>(s.begin(), s.end());
    };
    weights_ = take(dd);
    bias_ = take(1)[0];
    prep_.impute_mean = take(d);
    prep_.center = take(dd);
    prep_.scale = take(dd);
}

} // namespace litho::models
