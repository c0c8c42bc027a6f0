#include "litho/models/model.hpp"

#include <filesystem>

#include "litho/digest.hpp"
#include "litho/models/gbdt.hpp"
#include "litho/models/logistic.hpp"
#include "litho/models/mlp.hpp"
#include "litho/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace litho::models {

std::unique_ptr<Classifier> make_classifier(const std::string& family, const json& params,
                                            std::uint64_t seed) {
    if (family == "prior") return std::make_unique<PriorModel>();
    if (family == "logistic") {
        LogisticParams p;
        p.l2_penalty = params.value("l2_penalty", p.l2_penalty);
        p.max_iters = params.value("max_iters", p.max_iters);
        p.grad_tol = params.value("grad_tol", p.grad_tol);
        return std::make_unique<LogisticModel>(p);
    }
    if (family == "gbdt") {
        GbdtParams p;
        p.learning_rate = params.value("learning_rate", p.learning_rate);
        p.n_trees = params.value("n_trees", p.n_trees);
        p.max_depth = params.value("max_depth", p.max_depth);
        p.subspace_share = params.value("subspace_share", p.subspace_share);
        p.subsample_rate = params.value("subsample_rate", p.subsample_rate);
        p.min_leaf = params.value("min_leaf", p.min_leaf);
        p.class_weighting = params.value("class_weighting", p.class_weighting);
        p.seed = seed;
        p.validate();
        return std::make_unique<GbdtModel>(p);
    }
    if (family == "mlp") {
        MlpParams p;
        p.hidden = params.value("hidden", p.hidden);
        p.epochs = params.value("epochs", p.epochs);
        p.batch_size = params.value("batch_size", p.batch_size);
        p.step_size = params.value("step_size", p.step_size);
        p.momentum = params.value("momentum", p.momentum);
        p.seed = seed;
        return std::make_unique<MlpModel>(p);
    }
    throw ConfigError("unknown model family: " + family +
                      " (expected prior, logistic, gbdt or mlp)");
}

void save_model(const std::string& dir, const Classifier& model) {
    fs::create_directories(dir);
    std::vector<double> blob;
    json header = model.save_header(blob);

    ByteWriter w;
    for (double v : blob) w.f64(v);
    const auto bytes = w.take();
    write_file_bytes(dir + "/model.bin", bytes);

    json j;
    j["format"] = "lithobit-model";
    j["version"] = 1;
    j["family"] = model.family();
    j["header"] = std::move(header);
    j["blob"] = {{"file", "model.bin"},
                 {"count", blob.size()},
                 {"sha256", sha256_hex(bytes)}};
    const std::string text = j.dump(2) + "\n";
    write_file_bytes(dir + "/model.json",
                     std::span<const std::uint8_t>(
                         reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::unique_ptr<Classifier> load_model(const std::string& dir) {
    const auto jbytes = read_file_bytes(dir + "/model.json");
    const json j = json::parse(std::string(reinterpret_cast<const char*>(jbytes.data()),
                                           jbytes.size()));
    if (j.value("format", "") != std::string("lithobit-model"))
        throw DataError(dir + "/model.json: not a model file");
    const auto bbytes = read_file_bytes(dir + "/" + j.at("blob").at("file").get<std::string>());
    if (sha256_hex(bbytes) != j.at("blob").at("sha256").get<std::string>())
        throw DataError(dir + ": model blob digest mismatch");

    ByteReader r(bbytes);
    const std::size_t count = j.at("blob").at("count").get<std::size_t>();
    std::vector<double> blob(count);
    for (double& v : blob) v = r.f64();

    auto model = make_classifier(j.at("family").get<std::string>(), json::object(), 0);
    model->load(j.at("header"), blob);
    return model;
}

} // namespace litho::models
