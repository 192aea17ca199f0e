#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "arithdyn/model.hpp"
#include "arithdyn/task.hpp"
#include "arithdyn/vocab.hpp"

namespace arithdyn {

struct TrainConfig {
    double lr = 1e-3;
    double min_lr = 1e-4;
    int64_t warmup_iters = 100;
    int64_t decay_iters = -1; // -1 resolves to max_iters
    double beta1 = 0.9;
    double beta2 = 0.98;
    double weight_decay = 0.1;
    double grad_clip = 1.0;
    int batch_size = 512;
    int64_t max_iters = 5000;
    int64_t eval_every = 250;
    int64_t checkpoint_every = 0; // 0 = final checkpoint only
    int64_t eval_size = 2000;
    uint64_t seed = 0;
    int threads = 1;
    double temperature = 0.8;
    bool answer_only_loss = false;
    bool chunked = false;
    int chunk_window = 64;
    bool epoch_mode = false; // sample batches without replacement

    int64_t resolved_decay_iters() const { return decay_iters < 0 ? max_iters : decay_iters; }
    void validate() const;
};

double lr_at(int64_t step, const TrainConfig& cfg);

struct OptimizerState {
    Parameters m, v;
    int64_t step = 0;
};

// Decoupled AdamW: weight decay scales the parameter directly, the adaptive
// step only sees the gradient moments. Layer-norm gains are not decayed.
void adamw_update(OptimizerState& state, Parameters& params, const Parameters& grads, double lr,
                  const TrainConfig& cfg);

// Scales all gradients by max_norm/norm when the global L2 norm exceeds
// max_norm. Returns the pre-clip norm.
double clip_global_norm(Parameters& grads, double max_norm);

struct GradResult {
    double loss = 0.0;
    Parameters grads;
};

// Mean-loss gradients over a batch of right-padded sequences. Sub-batches are
// processed in parallel worker threads and reduced in a fixed order, so the
// result is deterministic for a given thread count.
GradResult compute_gradients(const Parameters& p, const ModelConfig& mc,
                             const std::vector<const TokenSeq*>& batch, int pad_id,
                             bool answer_only, uint64_t dropout_seed, int threads);

// --- checkpointing ----------------------------------------------------------

struct Checkpoint {
    std::string config_json; // model/train/task snapshot
    int64_t step = 0;
    uint64_t seed = 0;
    Parameters params;
    OptimizerState opt;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
// Loading needs parameter shapes; `shape` supplies a zeros template built
// from the run's model config (see peek_checkpoint_config for bootstrap).
Checkpoint load_checkpoint_with_shape(const std::string& path, const Parameters& shape);
std::string peek_checkpoint_config(const std::string& path);

// --- training loop ----------------------------------------------------------

// Evaluation hook: returns named metric values for one checkpoint. Keys with
// an "mi." prefix land in mi.csv, everything else in metrics.csv.
struct EvalHook {
    // Run the hook only when step % (eval_every * cadence) == 0 (and at the
    // final step).
    int cadence = 1;
    std::function<std::map<std::string, double>(const Parameters&, int64_t step)> fn;
};

struct TrainResult {
    Parameters params;
    int64_t steps = 0;
    double final_loss = 0.0;
    // One row per evaluation: step -> merged hook metrics (plus loss/lr).
    std::vector<std::map<std::string, double>> history;
};

// Runs the loop over pre-tokenized sequences; writes metrics.csv / mi.csv /
// checkpoints into out_dir when non-empty, and resumes from the newest
// checkpoint when resume is set.
TrainResult run_training_loop(const ModelConfig& mc, const TrainConfig& tc,
                              const std::vector<TokenSeq>& data, const Vocab& vocab,
                              const std::vector<EvalHook>& hooks, const std::string& out_dir,
                              bool resume, const std::string& config_json);

} // namespace arithdyn
