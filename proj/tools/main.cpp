// lithobit: batch toolkit for rock-type-at-the-bit classification from
// surface drilling telemetry. Subcommands: simulate, preprocess, featurize,
// train, evaluate, select-features, report.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "litho/csv.hpp"
#include "litho/eval.hpp"
#include "litho/features.hpp"
#include "litho/ingest.hpp"
#include "litho/models/model.hpp"
#include "litho/parallel.hpp"
#include "litho/seeds.hpp"
#include "litho/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace litho;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitTrain = 4;

json default_config() {
    return json{
        {"root", "."},
        {"paths", {{"raw_dir", "raw"}, {"cache_dir", "cache"}, {"out_dir", "out"}}},
        {"pipeline", {{"max_bad_row_share", 0.01}}},
        {"simulate",
         {{"wells", 8},
          {"bins_per_well", 1000},
          {"param_jitter", 0.15},
          {"missing_rate", 0.02},
          {"noise_scale", 1.0},
          {"nuisance_shift_scale", 1.0},
          {"samples_per_bin", 4},
          {"min_run", 20},
          {"target_share", 0.135}}},
        {"features",
         {{"families", json::array({"B", "D", "L"})},
          {"lag_distances_m", json::array({0.1, 0.5, 1.0, 10.0})},
          {"rolling_window_m", 1.0},
          {"extra_lags_m", json::array({20.0, 50.0})},
          {"math_window", 5}}},
        {"model",
         {{"family", "gbdt"},
          {"gbdt",
           {{"learning_rate", 0.05},
            {"n_trees", 100},
            {"max_depth", 3},
            {"subspace_share", 0.8},
            {"subsample_rate", 0.55},
            {"min_leaf", 20},
            {"class_weighting", false}}},
          {"logistic", {{"l2_penalty", 0.0}}},
          {"mlp",
           {{"hidden", json::array({100, 500})},
            {"epochs", 200},
            {"batch_size", 32},
            {"step_size", 0.01},
            {"momentum", 0.9}}},
          {"prior", json::object()}}},
        {"evaluate",
         {{"folds", "lowo"},
          {"greedy_tol", 1e-4},
          {"greedy_max_steps", 0},
          {"greedy_pool", json::array()}}},
        {"seed", 7},
        {"jobs", 0},
        {"verbosity", 1},
    };
}

void merge_into(json& base, const json& overlay) {
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (it->is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
            merge_into(base[it.key()], *it);
        } else {
            base[it.key()] = *it;
        }
    }
}

struct RunConfig {
    json resolved;
    fs::path root;

    fs::path raw_dir() const { return root / resolved["paths"]["raw_dir"].get<std::string>(); }
    fs::path cache_dir() const { return root / resolved["paths"]["cache_dir"].get<std::string>(); }
    fs::path out_dir() const { return root / resolved["paths"]["out_dir"].get<std::string>(); }
    std::uint64_t seed() const { return resolved["seed"].get<std::uint64_t>(); }
    int verbosity() const { return resolved["verbosity"].get<int>(); }
    std::string family() const { return resolved["model"]["family"].get<std::string>(); }
    json family_params() const {
        const std::string f = family();
        return resolved["model"].contains(f) ? resolved["model"][f] : json::object();
    }
};

RunConfig load_config(const std::string& config_path, const json& flag_overrides) {
    json resolved = default_config();
    fs::path root = fs::current_path();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file: " + config_path);
        json user;
        try {
            in >> user;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        merge_into(resolved, user);
        root = fs::absolute(config_path).parent_path();
    }
    merge_into(resolved, flag_overrides);
    if (resolved.contains("root") && resolved["root"].is_string()) {
        const fs::path declared = resolved["root"].get<std::string>();
        root = declared.is_absolute() ? declared : root / declared;
    }
    RunConfig cfg;
    cfg.resolved = std::move(resolved);
    cfg.root = fs::weakly_canonical(root);
    cfg.resolved["root"] = cfg.root.string();
    const std::string family = cfg.resolved["model"]["family"].get<std::string>();
    if (family != "prior" && family != "logistic" && family != "gbdt" && family != "mlp")
        throw ConfigError("unknown model family: " + family +
                          " (expected prior, logistic, gbdt or mlp)");
    parallel::set_jobs(cfg.resolved["jobs"].get<int>());
    return cfg;
}

void log_info(const RunConfig& cfg, const std::string& msg) {
    if (cfg.verbosity() > 0) std::cerr << "[lithobit] " << msg << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

void write_resolved_config(const RunConfig& cfg) {
    write_text(cfg.out_dir() / "resolved_config.json", cfg.resolved.dump(2) + "\n");
}

std::string iso_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Shared steps
// ---------------------------------------------------------------------------

synth::SynthWellSpec simulate_template(const RunConfig& cfg) {
    const json& sim = cfg.resolved["simulate"];
    synth::SynthWellSpec tmpl;
    tmpl.n_bins = sim["bins_per_well"].get<std::size_t>();
    tmpl.min_run = sim["min_run"].get<std::size_t>();
    tmpl.samples_per_bin = sim["samples_per_bin"].get<int>();
    tmpl.missing_rate = sim["missing_rate"].get<double>();
    const double noise_scale = sim["noise_scale"].get<double>();
    for (double& f : tmpl.noise_frac) f *= noise_scale;
    const double shift_scale = sim["nuisance_shift_scale"].get<double>();
    tmpl.qin.class1_shift *= shift_scale;
    tmpl.qout.class1_shift *= shift_scale;
    tmpl.spp.class1_shift *= shift_scale;
    tmpl.hl.class1_shift *= shift_scale;
    return tmpl;
}

ingest::PipelineConfig pipeline_config(const RunConfig& cfg) {
    ingest::PipelineConfig pc;
    const fs::path raw = cfg.raw_dir();
    if (!fs::exists(raw)) throw DataError("raw directory does not exist: " + raw.string());
    for (const auto& entry : fs::directory_iterator(raw)) {
        if (entry.path().extension() != ".csv") continue;
        const std::string name = entry.path().filename().string();
        if (name == "litho.csv" || name == "bounds.csv") continue;
        pc.mwd_files.push_back(entry.path().string());
    }
    std::sort(pc.mwd_files.begin(), pc.mwd_files.end());
    pc.litho_csv = (raw / "litho.csv").string();
    pc.bounds_csv = (raw / "bounds.csv").string();
    pc.cache_dir = cfg.cache_dir().string();
    pc.parse.max_bad_row_share = cfg.resolved["pipeline"]["max_bad_row_share"].get<double>();
    return pc;
}

features::FeatureSpec feature_spec(const RunConfig& cfg) {
    const json& f = cfg.resolved["features"];
    features::FeatureSpec spec;
    spec.families.clear();
    for (const auto& name : f["families"]) {
        const std::string s = name.get<std::string>();
        if (s == "-" || s.empty()) continue; // explicit "no features"
        const auto fam = features::family_from_name(s);
        if (!fam) throw ConfigError("unknown feature family: " + s);
        spec.families.push_back(*fam);
    }
    spec.lag_distances_m = f["lag_distances_m"].get<std::vector<double>>();
    spec.rolling_window_m = f["rolling_window_m"].get<double>();
    spec.extra_lags_m = f["extra_lags_m"].get<std::vector<double>>();
    spec.math_window = f["math_window"].get<std::size_t>();
    if (f.contains("greedy_features"))
        spec.g_features = f["greedy_features"].get<std::vector<std::string>>();
    spec.validate();
    return spec;
}

features::FeatureMatrix build_matrix(const RunConfig& cfg) {
    const auto pc = pipeline_config(cfg);
    const auto result = ingest::run_pipeline(pc);
    log_info(cfg, "pipeline: " + std::to_string(result.stats.stages_run) + " stages run, " +
                      std::to_string(result.stats.stages_cached) + " cached");
    return features::assemble_matrix(result.frames, feature_spec(cfg));
}

eval::ModelFactory model_factory(const RunConfig& cfg) {
    const std::string family = cfg.family();
    const json params = cfg.family_params();
    return [family, params](std::uint64_t fold_seed) {
        return models::make_classifier(family, params, fold_seed);
    };
}

std::string family_tag(const RunConfig& cfg) {
    std::string tag = cfg.family() + " [";
    bool first = true;
    for (const auto& fam : cfg.resolved["features"]["families"]) {
        if (!first) tag += ",";
        tag += fam.get<std::string>();
        first = false;
    }
    return tag + "]";
}

json report_json(const RunConfig& cfg, const eval::EvaluationReport& rep,
                 const eval::GreedyResult* selection) {
    json folds = json::array();
    for (const auto& f : rep.folds) {
        json jf{{"test_well", f.test_well},
                {"flagged", f.flagged},
                {"accuracy_l", f.accuracy_l},
                {"majority_accuracy_l", f.majority_accuracy_l},
                {"shale_share", f.shale_share},
                {"n_rows", f.n_rows}};
        jf["roc_auc"] = f.roc_auc ? json(*f.roc_auc) : json();
        jf["pr_auc"] = f.pr_auc ? json(*f.pr_auc) : json();
        folds.push_back(std::move(jf));
    }
    json pooled{{"accuracy_l", rep.pooled_accuracy_l},
                {"majority_accuracy_l", rep.pooled_majority_accuracy_l},
                {"class_share", rep.class_share}};
    pooled["roc_auc"] = rep.pooled_roc_auc ? json(*rep.pooled_roc_auc) : json();
    pooled["pr_auc"] = rep.pooled_pr_auc ? json(*rep.pooled_pr_auc) : json();

    json out{{"label", family_tag(cfg)},
             {"config", cfg.resolved},
             {"folds", std::move(folds)},
             {"pooled", std::move(pooled)},
             {"meta", {{"timestamp", iso_now()}, {"runtime_seconds", rep.runtime_seconds}}}};
    if (selection) {
        out["selection"] = {{"base_score", selection->base_score},
                            {"selected", selection->selected},
                            {"step_scores", selection->step_scores}};
    }
    return out;
}

void write_report_files(const RunConfig& cfg, const eval::EvaluationReport& rep,
                        const eval::GreedyResult* selection) {
    const fs::path out = cfg.out_dir();
    fs::create_directories(out);
    write_text(out / "report.json", report_json(cfg, rep, selection).dump(2) + "\n");
    if (!rep.pooled_y.empty()) {
        eval::write_roc_csv((out / "roc.csv").string(), rep.pooled_y, rep.pooled_scores);
        eval::write_pr_csv((out / "pr.csv").string(), rep.pooled_y, rep.pooled_scores);
    }
    std::string wells = "well_id,shale_share,accl_model,accl_major,improvement\n";
    for (const auto& f : rep.folds) {
        if (f.flagged) continue;
        wells += f.test_well + "," + csv::format_double(f.shale_share) + "," +
                 csv::format_double(f.accuracy_l) + "," +
                 csv::format_double(f.majority_accuracy_l) + "," +
                 csv::format_double(f.accuracy_l - f.majority_accuracy_l) + "\n";
    }
    write_text(out / "wells.csv", wells);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg) {
    const json& sim = cfg.resolved["simulate"];
    const synth::SynthWellSpec tmpl = simulate_template(cfg);
    synth::BenchmarkOptions opts;
    opts.param_jitter = sim["param_jitter"].get<double>();
    opts.target_share = sim["target_share"].get<double>();
    const auto laterals =
        synth::gen_benchmark(sim["wells"].get<std::size_t>(), tmpl, cfg.seed(), opts);
    synth::write_benchmark_csv(cfg.raw_dir().string(), laterals);
    write_resolved_config(cfg);

    std::size_t ones = 0, total = 0;
    for (const auto& lat : laterals) {
        for (std::size_t i = 0; i < lat.frame.labels.size(); ++i) ones += lat.frame.labels.cls[i];
        total += lat.frame.labels.size();
    }
    std::cout << "simulate: wells=" << laterals.size() << " bins=" << total << " shale_share="
              << csv::format_double(static_cast<double>(ones) / static_cast<double>(total))
              << " raw=" << cfg.raw_dir().string() << "\n";
    return 0;
}

int cmd_preprocess(const RunConfig& cfg) {
    const auto result = ingest::run_pipeline(pipeline_config(cfg));
    write_resolved_config(cfg);
    std::size_t bins = 0;
    for (const auto& f : result.frames) bins += f.grid.n_bins;
    std::cout << "preprocess: frames=" << result.frames.size() << " bins=" << bins
              << " stages_run=" << result.stats.stages_run
              << " stages_cached=" << result.stats.stages_cached
              << " cache=" << cfg.cache_dir().string() << "\n";
    return 0;
}

int cmd_featurize(const RunConfig& cfg) {
    const auto matrix = build_matrix(cfg);
    fs::create_directories(cfg.out_dir());
    const fs::path path = cfg.out_dir() / "features.csv";
    matrix.write_csv(path.string());
    write_resolved_config(cfg);
    std::cout << "featurize: rows=" << matrix.n_rows() << " cols=" << matrix.n_cols()
              << " out=" << path.string() << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    const auto matrix = build_matrix(cfg);
    auto model = models::make_classifier(cfg.family(), cfg.family_params(),
                                         derive_seed(cfg.seed(), "train", 0));
    model->fit(matrix);
    fs::create_directories(cfg.out_dir());
    models::save_model(cfg.out_dir().string(), *model);
    write_resolved_config(cfg);
    std::cout << "train: family=" << cfg.family() << " rows=" << matrix.n_rows()
              << " cols=" << matrix.n_cols()
              << " model=" << (cfg.out_dir() / "model.json").string() << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    const auto matrix = build_matrix(cfg);
    const auto folds = eval::lowo_folds(matrix);
    const auto rep = eval::evaluate_cv(matrix, model_factory(cfg), folds, cfg.seed());
    write_report_files(cfg, rep, nullptr);
    write_resolved_config(cfg);
    std::cout << "evaluate: family=" << cfg.family() << " folds=" << folds.size() << " roc_auc="
              << (rep.pooled_roc_auc ? csv::format_double(*rep.pooled_roc_auc) : "-")
              << " pr_auc=" << (rep.pooled_pr_auc ? csv::format_double(*rep.pooled_pr_auc) : "-")
              << " accuracy_l=" << csv::format_double(rep.pooled_accuracy_l)
              << " report=" << (cfg.out_dir() / "report.json").string() << "\n";
    return 0;
}

int cmd_select_features(const RunConfig& cfg) {
    const auto matrix = build_matrix(cfg);
    const auto folds = eval::lowo_folds(matrix);
    const json& ev = cfg.resolved["evaluate"];
    std::vector<std::string> pool = ev["greedy_pool"].get<std::vector<std::string>>();
    if (pool.empty()) pool = matrix.columns;
    const auto selection = eval::greedy_select(
        matrix, pool, model_factory(cfg), folds, cfg.seed(), ev["greedy_tol"].get<double>(),
        ev["greedy_max_steps"].get<std::size_t>());

    eval::EvaluationReport rep;
    if (!selection.selected.empty()) {
        const auto sub = matrix.select_columns(selection.selected);
        rep = eval::evaluate_cv(sub, model_factory(cfg), folds, cfg.seed());
    }
    write_report_files(cfg, rep, &selection);
    write_resolved_config(cfg);
    std::cout << "select-features: pool=" << pool.size()
              << " selected=" << selection.selected.size() << " best_auc="
              << csv::format_double(selection.step_scores.empty() ? selection.base_score
                                                                  : selection.step_scores.back())
              << " report=" << (cfg.out_dir() / "report.json").string() << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& report_files) {
    if (report_files.empty()) throw ConfigError("report: no report.json files given");
    std::string table;
    char line[256];
    std::snprintf(line, sizeof(line), "%-42s %9s %9s %11s\n", "Configuration", "ROC AUC", "PR AUC",
                  "Accuracy L");
    table += line;
    table += std::string(74, '-') + "\n";
    bool baseline_done = false;
    for (const std::string& path : report_files) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open report: " + path);
        json rep;
        in >> rep;
        const auto& pooled = rep.at("pooled");
        if (!baseline_done) {
            // Constant majority-class prediction: ROC AUC 0.5 by definition,
            // PR AUC equal to the positive share.
            std::snprintf(line, sizeof(line), "%-42s %9.3f %9.3f %11.3f\n",
                          "Always predict the major class", 0.5,
                          pooled.at("class_share").get<double>(),
                          pooled.at("majority_accuracy_l").get<double>());
            table += line;
            baseline_done = true;
        }
        const std::string label = rep.value("label", path);
        std::snprintf(line, sizeof(line), "%-42s %9.3f %9.3f %11.3f\n", label.c_str(),
                      pooled.at("roc_auc").is_null() ? 0.0 : pooled.at("roc_auc").get<double>(),
                      pooled.at("pr_auc").is_null() ? 0.0 : pooled.at("pr_auc").get<double>(),
                      pooled.at("accuracy_l").get<double>());
        table += line;
        if (rep.contains("selection")) {
            const auto& sel = rep.at("selection");
            table += "  selection order:";
            const auto names = sel.at("selected").get<std::vector<std::string>>();
            const auto scores = sel.at("step_scores").get<std::vector<double>>();
            for (std::size_t i = 0; i < names.size(); ++i) {
                std::snprintf(line, sizeof(line), " %s(%.4f)", names[i].c_str(), scores[i]);
                table += line;
            }
            table += "\n";
        }
    }
    std::cout << table;
    return 0;
}

json parse_family_list(const std::string& csv_list) {
    json fams = json::array();
    std::string cur;
    for (char c : csv_list + ",") {
        if (c == ',') {
            if (!cur.empty()) fams.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    return fams;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rock type at the drilling bit from surface telemetry"};
    app.require_subcommand(1);

    std::string config_path;
    json overrides = json::object();
    std::vector<std::string> report_files;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t v) { overrides["seed"] = v; }, "master RNG seed");
        cmd->add_option_function<int>(
            "--jobs", [&](int v) { overrides["jobs"] = v; }, "worker thread cap (0 = all cores)");
        cmd->add_option_function<std::string>(
            "--out", [&](const std::string& v) { overrides["paths"]["out_dir"] = v; },
            "output directory");
        cmd->add_option_function<int>(
            "--verbosity", [&](int v) { overrides["verbosity"] = v; }, "0 = quiet");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "write a synthetic raw benchmark");
    add_common(simulate);
    simulate->add_option_function<std::size_t>(
        "--wells", [&](std::size_t v) { overrides["simulate"]["wells"] = v; }, "number of wells");

    CLI::App* preprocess = app.add_subcommand("preprocess", "run the staged ingest pipeline");
    add_common(preprocess);

    CLI::App* featurize = app.add_subcommand("featurize", "assemble and export the feature matrix");
    add_common(featurize);
    featurize->add_option_function<std::string>(
        "--families",
        [&](const std::string& v) { overrides["features"]["families"] = parse_family_list(v); },
        "comma-separated feature families (B,D,L,F,E,M,FM,G)");

    CLI::App* train = app.add_subcommand("train", "fit one model on all cached wells");
    add_common(train);
    train->add_option_function<std::string>(
        "--family", [&](const std::string& v) { overrides["model"]["family"] = v; },
        "model family: prior|logistic|gbdt|mlp");

    CLI::App* evaluate = app.add_subcommand("evaluate", "leave-one-well-out cross-validation");
    add_common(evaluate);
    evaluate->add_option_function<std::string>(
        "--family", [&](const std::string& v) { overrides["model"]["family"] = v; },
        "model family: prior|logistic|gbdt|mlp");
    evaluate->add_option_function<std::string>(
        "--families",
        [&](const std::string& v) { overrides["features"]["families"] = parse_family_list(v); },
        "comma-separated feature families");

    CLI::App* select = app.add_subcommand("select-features", "greedy forward selection");
    add_common(select);

    CLI::App* report = app.add_subcommand("report", "render report.json files as a table");
    report->add_option("files", report_files, "report.json paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (report->parsed()) return cmd_report(report_files);
        const RunConfig cfg = load_config(config_path, overrides);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (preprocess->parsed()) return cmd_preprocess(cfg);
        if (featurize->parsed()) return cmd_featurize(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (evaluate->parsed()) return cmd_evaluate(cfg);
        if (select->parsed()) return cmd_select_features(cfg);
        throw ConfigError("no subcommand");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TrainError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return kExitTrain;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
