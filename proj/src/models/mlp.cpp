#include "litho/models/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "litho/kernels.hpp"
#include "litho/seeds.hpp"

namespace litho::models {

void MlpCore::init(std::span<const std::size_t> layer_dims, std::uint64_t seed) {
    dims.assign(layer_dims.begin(), layer_dims.end());
    W.clear();
    b.clear();
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::size_t din = dims[l], dout = dims[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(din + dout));
        std::uniform_real_distribution<double> u(-bound, bound);
        std::vector<double> w(din * dout);
        for (double& x : w) x = u(rng);
        W.push_back(std::move(w));
        // Small positive hidden bias keeps rectifier units off the exact
        // kink and away from dead starts; the output layer stays at zero.
        const bool is_output = l + 2 == dims.size();
        b.push_back(std::vector<double>(dout, is_output ? 0.0 : 0.01));
    }
}

std::vector<double> MlpCore::forward(std::span<const double> X, std::size_t n) const {
    std::vector<double> act(X.begin(), X.end());
    for (std::size_t l = 0; l < W.size(); ++l) {
        const std::size_t din = dims[l], dout = dims[l + 1];
        std::vector<double> z(n * dout);
        kernels::affine_forward(act, n, din, W[l], b[l], dout, z);
        if (l + 1 < W.size()) {
            for (double& v : z) v = v > 0.0 ? v : 0.0; // ReLU
        }
        act = std::move(z);
    }
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = sigmoid(act[i]);
    return p;
}

double MlpCore::loss_and_grad(std::span<const double> X, std::size_t n,
                              std::span<const std::uint8_t> y,
                              std::vector<std::vector<double>>& gW,
                              std::vector<std::vector<double>>& gb) const {
    const std::size_t n_layers = W.size();
    gW.resize(n_layers);
    gb.resize(n_layers);

    // Forward pass keeping pre-activations.
    std::vector<std::vector<double>> acts(n_layers + 1);
    acts[0].assign(X.begin(), X.end());
    std::vector<std::vector<double>> zs(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t din = dims[l], dout = dims[l + 1];
        zs[l].assign(n * dout, 0.0);
        kernels::affine_forward(acts[l], n, din, W[l], b[l], dout, zs[l]);
        acts[l + 1] = zs[l];
        if (l + 1 < n_layers) {
            for (double& v : acts[l + 1]) v = v > 0.0 ? v : 0.0;
        }
    }

    double loss = 0.0;
    std::vector<double> delta(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = sigmoid(acts[n_layers][i]);
        const double pc = clamp_proba(p);
        loss += y[i] ? -std::log(pc) : -std::log(1.0 - pc);
        delta[i] = (p - (y[i] ? 1.0 : 0.0)) * inv_n;
    }
    loss *= inv_n;

    // Backward pass.
    std::vector<double> cur = std::move(delta);
    for (std::size_t l = n_layers; l-- > 0;) {
        const std::size_t din = dims[l], dout = dims[l + 1];
        gW[l].assign(din * dout, 0.0);
        gb[l].assign(dout, 0.0);
        kernels::affine_backward_weights(acts[l], n, din, cur, dout, gW[l], gb[l]);
        if (l > 0) {
            std::vector<double> prev(n * din);
            kernels::affine_backward_inputs(cur, n, dout, W[l], din, prev);
            for (std::size_t i = 0; i < prev.size(); ++i) {
                if (zs[l - 1][i] <= 0.0) prev[i] = 0.0; // ReLU gate
            }
            cur = std::move(prev);
        }
    }
    return loss;
}

std::size_t MlpCore::n_params() const {
    std::size_t total = 0;
    for (std::size_t l = 0; l < W.size(); ++l) total += W[l].size() + b[l].size();
    return total;
}

std::vector<double> MlpCore::pack() const {
    std::vector<double> flat;
    flat.reserve(n_params());
    for (std::size_t l = 0; l < W.size(); ++l) {
        flat.insert(flat.end(), W[l].begin(), W[l].end());
        flat.insert(flat.end(), b[l].begin(), b[l].end());
    }
    return flat;
}

void MlpCore::unpack(std::span<const double> flat) {
    std::size_t pos = 0;
    for (std::size_t l = 0; l < W.size(); ++l) {
        for (double& v : W[l]) v = flat[pos++];
        for (double& v : b[l]) v = flat[pos++];
    }
}

// ---------------------------------------------------------------------------

void MlpModel::fit(const features::FeatureMatrix& m) {
    if (!(params_.step_size > 0.0)) throw ConfigError("mlp: step_size must be > 0");
    if (params_.batch_size < 1) throw ConfigError("mlp: batch_size must be >= 1");
    require_both_classes(m, family());

    prep_ = DensePrep::fit(m);
    const std::vector<double> X = prep_.transform(m);
    const std::size_t n = m.n_rows();
    const std::size_t dd = prep_.dense_dim();

    std::vector<std::size_t> layer_dims;
    layer_dims.push_back(dd);
    for (std::size_t h : params_.hidden) layer_dims.push_back(h);
    layer_dims.push_back(1);
    core_.init(layer_dims, derive_seed(params_.seed, "mlp-init", 0));

    std::vector<std::vector<double>> vel_W(core_.W.size()), vel_b(core_.b.size());
    for (std::size_t l = 0; l < core_.W.size(); ++l) {
        vel_W[l].assign(core_.W[l].size(), 0.0);
        vel_b[l].assign(core_.b[l].size(), 0.0);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<double>> gW, gb;
    epoch_loss_.clear();

    for (std::size_t epoch = 0; epoch < params_.epochs; ++epoch) {
        std::mt19937_64 rng(derive_seed(params_.seed, "mlp-epoch", epoch));
        std::shuffle(order.begin(), order.end(), rng);

        double loss_sum = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < n; start += params_.batch_size) {
            const std::size_t bn = std::min(params_.batch_size, n - start);
            std::vector<double> bx(bn * dd);
            std::vector<std::uint8_t> by(bn);
            for (std::size_t i = 0; i < bn; ++i) {
                const std::size_t r = order[start + i];
                std::copy_n(X.data() + r * dd, dd, bx.data() + i * dd);
                by[i] = m.target[r];
            }
            const double loss = core_.loss_and_grad(bx, bn, by, gW, gb);
            loss_sum += loss;
            ++n_batches;
            for (std::size_t l = 0; l < core_.W.size(); ++l) {
                for (std::size_t k = 0; k < core_.W[l].size(); ++k) {
                    vel_W[l][k] = params_.momentum * vel_W[l][k] - params_.step_size * gW[l][k];
                    core_.W[l][k] += vel_W[l][k];
                }
                for (std::size_t k = 0; k < core_.b[l].size(); ++k) {
                    vel_b[l][k] = params_.momentum * vel_b[l][k] - params_.step_size * gb[l][k];
                    core_.b[l][k] += vel_b[l][k];
                }
            }
        }
        const double mean_loss = loss_sum / static_cast<double>(n_batches);
        epoch_loss_.push_back(mean_loss);
        if (!std::isfinite(mean_loss))
            throw TrainError("mlp: training loss diverged to non-finite; reduce step_size");
    }
}

std::vector<double> MlpModel::predict_proba(const features::FeatureMatrix& m) const {
    const std::vector<double> X = prep_.transform(m);
    return core_.forward(X, m.n_rows());
}

nlohmann::json MlpModel::save_header(std::vector<double>& blob) const {
    nlohmann::json j;
    j["schema"] = prep_.schema;
    j["params"] = {{"hidden", params_.hidden},   {"epochs", params_.epochs},
                   {"batch_size", params_.batch_size}, {"step_size", params_.step_size},
                   {"momentum", params_.momentum},     {"seed", params_.seed}};
    j["dims"] = core_.dims;
    const auto flat = core_.pack();
    blob.insert(blob.end(), flat.begin(), flat.end());
    blob.insert(blob.end(), prep_.impute_mean.begin(), prep_.impute_mean.end());
    blob.insert(blob.end(), prep_.center.begin(), prep_.center.end());
    blob.insert(blob.end(), prep_.scale.begin(), prep_.scale.end());
    return j;
}

void MlpModel::load(const nlohmann::json& header, std::span<const double> blob) {
    prep_.schema = header.at("schema").get<std::vector<std::string>>();
    const auto& p = header.at("params");
    params_.hidden = p.at("hidden").get<std::vector<std::size_t>>();
    params_.epochs = p.at("epochs").get<std::size_t>();
    params_.batch_size = p.at("batch_size").get<std::size_t>();
    params_.step_size = p.at("step_size").get<double>();
    params_.momentum = p.at("momentum").get<double>();
    params_.seed = p.at("seed").get<std::uint64_t>();
    const auto dims = header.at("dims").get<std::vector<std::size_t>>();
    core_.init(dims, 0);
    const std::size_t np = core_.n_params();
    const std::size_t d = prep_.schema.size();
    const std::size_t dd = 2 * d;
    if (blob.size() != np + d + 2 * dd) throw DataError("mlp model blob size mismatch");
    core_.unpack(blob.subspan(0, np));
    std::size_t pos = np;
    prep_.impute_mean.assign(blob.begin() + pos, blob.begin() + pos + d);
    pos += d;
    prep_.center.assign(blob.begin() + pos, blob.begin() + pos + dd);
    pos += dd;
    prep_.scale.assign(blob.begin() + pos, blob.begin() + pos + dd);
}

// ---------------------------------------------------------------------------

void PriorModel::fit(const features::FeatureMatrix& m) {
    if (m.n_rows() == 0) throw TrainError("prior: empty training data");
    schema_ = m.columns;
    std::size_t ones = 0;
    for (std::uint8_t y : m.target) ones += (y == 1);
    prior_ = static_cast<double>(ones) / static_cast<double>(m.n_rows());
}

std::vector<double> PriorModel::predict_proba(const features::FeatureMatrix& m) const {
    check_schema(schema_, m);
    return std::vector<double>(m.n_rows(), prior_);
}

nlohmann::json PriorModel::save_header(std::vector<double>& blob) const {
    nlohmann::json j;
    j["schema"] = schema_;
    blob.push_back(prior_);
    return j;
}

void PriorModel::load(const nlohmann::json& header, std::span<const double> blob) {
    schema_ = header.at("schema").get<std::vector<std::string>>();
    if (blob.size() != 1) throw DataError("prior model blob size mismatch");
    prior_ = blob[0];
}

} // namespace litho::models
