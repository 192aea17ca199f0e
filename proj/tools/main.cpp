#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include <json.hpp>

#include "arithdyn/datagen.hpp"
#include "arithdyn/decode.hpp"
#include "arithdyn/infotheory.hpp"
#include "arithdyn/io.hpp"
#include "arithdyn/runner.hpp"

namespace fs = std::filesystem;
using namespace arithdyn;
using nlohmann::json;

namespace {

RunSettings load_settings(const std::string& config_path, const std::vector<std::string>& overrides) {
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) kv = parse_config_file(config_path);
    for (const auto& ov : overrides) {
        size_t eq = ov.find('=');
        if (eq == std::string::npos) throw std::runtime_error("--set expects key=value, got '" + ov + "'");
        kv[ov.substr(0, eq)] = ov.substr(eq + 1);
    }
    return settings_from_kv(kv);
}

int cmd_gen(const std::string& config, const std::vector<std::string>& sets, const std::string& out) {
    RunSettings s = load_settings(config, sets);
    std::vector<Example> examples = generate(s.task);
    fs::path path = out.empty() ? fs::path(task_name(s.task.task) + ".txt") : fs::path(out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_dataset(examples, path.string());
    std::string hash = dataset_content_hash(examples);
    json manifest;
    manifest["task"] = json::parse(settings_to_json(s))["task.kind"];
    for (auto& [k, v] : settings_to_kv(s))
        if (k.rfind("task.", 0) == 0) manifest[k] = v;
    manifest["examples"] = examples.size();
    manifest["content_hash"] = hash;
    write_text_file(path.string() + ".manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << examples.size() << " examples to " << path.string() << "\n";
    std::cout << "content hash " << hash << "\n";
    return 0;
}

int cmd_train(const std::string& config, const std::vector<std::string>& sets, const std::string& out,
              bool resume) {
    RunSettings s = load_settings(config, sets);
    std::string dir = resolve_run_dir(out.empty() ? ("run-" + task_name(s.task.task)) : out);
    TrainResult r = run_training(s, dir, resume);
    std::cout << "run complete: " << r.steps << " steps, final loss " << r.final_loss << "\n";
    std::cout << "artifacts in " << dir << "\n";
    return 0;
}

std::string newest_checkpoint(const std::string& dir) {
    int64_t best = -1;
    fs::path found;
    for (auto& entry : fs::directory_iterator(dir)) {
        auto name = entry.path().filename().string();
        if (name.rfind("ckpt_", 0) == 0 && name.size() > 9) {
            int64_t s = std::stoll(name.substr(5, name.size() - 9));
            if (s > best) {
                best = s;
                found = entry.path();
            }
        }
    }
    if (best < 0) throw std::runtime_error("no checkpoint under " + dir);
    return found.string();
}

int cmd_eval(const std::string& ckpt, long long eval_size, double temperature) {
    std::string path = fs::is_directory(ckpt) ? newest_checkpoint(ckpt) : ckpt;
    LoadedRun run = load_run_checkpoint(path);
    if (eval_size > 0) run.settings.train.eval_size = eval_size;
    if (temperature >= 0) run.settings.train.temperature = temperature;
    EvalSuites suites = build_eval_suites(run.settings, {});
    auto metrics = evaluate_snapshot(run.settings, suites, run.params, run.step, "");
    std::cout << "step " << run.step << "\n";
    for (auto& [k, v] : metrics) std::cout << "  " << k << " = " << v << "\n";
    return 0;
}

int cmd_probe_mi(const std::string& ckpt, long long eval_size) {
    std::string path = fs::is_directory(ckpt) ? newest_checkpoint(ckpt) : ckpt;
    LoadedRun run = load_run_checkpoint(path);
    if (run.settings.task.task != Task::Addition)
        throw std::runtime_error("probe-mi expects an addition run");
    if (eval_size > 0) run.settings.train.eval_size = eval_size;
    std::vector<Example> train_examples = generate(run.settings.task);
    EvalSuites suites = build_eval_suites(run.settings, train_examples);
    auto metrics = mi_probe_snapshot(run.settings, suites, run.params);
    std::cout << "step " << run.step << "\n";
    for (auto& [k, v] : metrics) std::cout << "  " << k << " = " << v << "\n";
    return 0;
}

int cmd_verify_theorem(bool inject_fault) {
    Theorem1Report rep = exact_theorem1(inject_fault);
    std::cout << rep.table_text();
    std::cout << "runtime " << rep.runtime_seconds << " s\n";
    if (!rep.ok) {
        for (const auto& v : rep.violations) std::cout << "VIOLATION: " << v << "\n";
        std::cout << "verify-theorem: FAIL\n";
        return 1;
    }
    std::cout << "verify-theorem: PASS (all independence and positivity claims hold)\n";
    return 0;
}

int cmd_report(const std::string& run_dir) {
    std::string warnings;
    int charts = write_report(resolve_run_dir(run_dir), &warnings);
    if (!warnings.empty()) std::cout << warnings;
    std::cout << "wrote " << charts << " charts under " << resolve_run_dir(run_dir) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"training-dynamics workbench for synthetic arithmetic transformers"};
    app.require_subcommand(1);

    std::string config, out, ckpt, run_dir;
    std::vector<std::string> sets;
    bool resume = false, inject_fault = false;
    long long eval_size = 0;
    double temperature = -1;

    auto* gen = app.add_subcommand("gen", "generate a dataset file + manifest");
    gen->add_option("-c,--config", config, "flat key=value config file");
    gen->add_option("--set", sets, "override config entries (key=value)");
    gen->add_option("-o,--out", out, "output dataset path");

    auto* train = app.add_subcommand("train", "train a model and record metrics");
    train->add_option("-c,--config", config, "flat key=value config file");
    train->add_option("--set", sets, "override config entries (key=value)");
    train->add_option("-o,--out", out, "run directory (relative paths resolve under ARITHDYN_RUN_ROOT)");
    train->add_flag("--resume", resume, "resume from the newest checkpoint in the run directory");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the task's suites");
    eval->add_option("ckpt", ckpt, "checkpoint file or run directory")->required();
    eval->add_option("--eval-size", eval_size, "override evaluation set size");
    eval->add_option("--temperature", temperature, "override sampling temperature (0 = greedy)");

    auto* probe = app.add_subcommand("probe-mi", "mutual-information probes for an addition checkpoint");
    probe->add_option("ckpt", ckpt, "checkpoint file or run directory")->required();
    probe->add_option("--eval-size", eval_size, "override probe sample size");

    auto* verify = app.add_subcommand("verify-theorem", "exact verification of the addition MI structure");
    verify->add_flag("--inject-fault", inject_fault, "corrupt one internal table (self-test hook)");

    auto* report = app.add_subcommand("report", "emit SVG charts and tidy CSV for a run directory");
    report->add_option("run_dir", run_dir, "run directory with metrics.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(config, sets, out);
        if (train->parsed()) return cmd_train(config, sets, out, resume);
        if (eval->parsed()) return cmd_eval(ckpt, eval_size, temperature);
        if (probe->parsed()) return cmd_probe_mi(ckpt, eval_size);
        if (verify->parsed()) return cmd_verify_theorem(inject_fault);
        if (report->parsed()) return cmd_report(run_dir);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 2;
}
