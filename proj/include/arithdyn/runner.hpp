#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "arithdyn/datagen.hpp"
#include "arithdyn/infotheory.hpp"
#include "arithdyn/io.hpp"
#include "arithdyn/metrics.hpp"
#include "arithdyn/train.hpp"

namespace arithdyn {

// Fixed held-out suites for one run, generated once from seeds disjoint from
// the training stream.
struct EvalSuites {
    Vocab vocab;
    TaskSpec spec;
    std::vector<Example> main_test; // same distribution as training
    std::vector<TestSuite> extra;   // task-dependent diagnostic suites
    MIBaselines mi_baselines;       // addition only
    bool has_mi = false;
};

EvalSuites build_eval_suites(const RunSettings& s, const std::vector<Example>& train_examples);

// Evaluates one parameter snapshot on every suite; keys follow the
// "group.name" convention used by metrics.csv and the report charts.
std::map<std::string, double> evaluate_snapshot(const RunSettings& s, const EvalSuites& suites,
                                                const Parameters& params, int64_t step,
                                                const std::string& errdiff_path);

// MI probes of the model's predictive distributions on the main test suite,
// with the training-data baselines attached (mi.* keys).
std::map<std::string, double> mi_probe_snapshot(const RunSettings& s, const EvalSuites& suites,
                                                const Parameters& params);

// Generation + training data preparation + hook wiring + the training loop.
TrainResult run_training(const RunSettings& s, const std::string& out_dir, bool resume);

// Loads a checkpoint alongside its embedded settings snapshot.
struct LoadedRun {
    RunSettings settings;
    Parameters params;
    int64_t step = 0;
};
LoadedRun load_run_checkpoint(const std::string& ckpt_path);

// Renders SVG charts + tidy.csv from a run directory's metric files.
// Returns the number of charts written; missing metric columns are skipped
// with a warning line appended to *warnings.
int write_report(const std::string& run_dir, std::string* warnings);

} // namespace arithdyn
