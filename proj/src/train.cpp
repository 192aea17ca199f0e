#include "arithdyn/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fs = std::filesystem;

namespace arithdyn {

void TrainConfig::validate() const {
    if (!(min_lr > 0 && min_lr <= lr)) throw std::runtime_error("train config: need 0 < min_lr <= lr");
    if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1))
        throw std::runtime_error("train config: betas must be in [0,1)");
    if (!(warmup_iters < resolved_decay_iters()))
        throw std::runtime_error("train config: warmup_iters must be below decay_iters");
    if (batch_size < 1 || max_iters < 1 || eval_every < 1) throw std::runtime_error("train config: bad sizes");
}

double lr_at(int64_t step, const TrainConfig& cfg) {
    if (step < 0) throw std::runtime_error("lr_at: negative step");
    const int64_t decay = cfg.resolved_decay_iters();
    if (step < cfg.warmup_iters) return cfg.lr * double(step) / double(cfg.warmup_iters);
    if (step > decay) return cfg.min_lr;
    double progress = double(step - cfg.warmup_iters) / double(decay - cfg.warmup_iters);
    return cfg.min_lr + (cfg.lr - cfg.min_lr) * 0.5 * (1.0 + std::cos(M_PI * progress));
}

double clip_global_norm(Parameters& grads, double max_norm) {
    double sq = 0.0;
    grads.for_each([&sq](const std::string&, RowMat<float>& g) { sq += double(g.squaredNorm()); });
    double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0) {
        float s = float(max_norm / norm);
        grads.for_each([s](const std::string&, RowMat<float>& g) { g *= s; });
    }
    return norm;
}

void adamw_update(OptimizerState& state, Parameters& params, const Parameters& grads, double lr,
                  const TrainConfig& cfg) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.step));
    const float b1 = float(cfg.beta1), b2 = float(cfg.beta2);
    const float eps = 1e-8f;

    struct Slot { RowMat<float>*p, *g, *m, *v; bool decay; };
    std::vector<Slot> slots;
    params.for_each([&](const std::string& name, RowMat<float>& t) {
        bool decay = name.find("ln") == std::string::npos;
        slots.push_back({&t, nullptr, nullptr, nullptr, decay});
    });
    size_t i = 0;
    const_cast<Parameters&>(grads).for_each([&](const std::string&, RowMat<float>& t) { slots[i++].g = &t; });
    i = 0;
    state.m.for_each([&](const std::string&, RowMat<float>& t) { slots[i++].m = &t; });
    i = 0;
    state.v.for_each([&](const std::string&, RowMat<float>& t) { slots[i++].v = &t; });

    for (auto& s : slots) {
        if (!s.g->allFinite()) throw std::runtime_error("adamw_update: non-finite gradient");
        if (s.decay && cfg.weight_decay != 0.0) *s.p *= float(1.0 - lr * cfg.weight_decay);
        *s.m = b1 * *s.m + (1.0f - b1) * *s.g;
        *s.v = b2 * s.v->array().matrix() + (1.0f - b2) * s.g->array().square().matrix();
        auto mhat = (s.m->array() / float(bc1));
        auto vhat = (s.v->array() / float(bc2));
        s.p->array() -= float(lr) * mhat / (vhat.sqrt() + eps);
        if (!s.p->allFinite()) throw std::runtime_error("adamw_update: non-finite parameter after update");
    }
}

namespace {

struct BatchTensors {
    std::vector<int> ids;
    std::vector<int> targets;
    std::vector<uint8_t> mask;
    int batch = 0, seq_len = 0;
};

BatchTensors assemble(const std::vector<const TokenSeq*>& batch, int pad_id, bool answer_only) {
    BatchTensors bt;
    bt.batch = int(batch.size());
    bt.seq_len = int(batch[0]->ids.size());
    bt.ids.resize(size_t(bt.batch) * bt.seq_len);
    bt.targets.assign(size_t(bt.batch) * bt.seq_len, 0);
    bt.mask.assign(size_t(bt.batch) * bt.seq_len, 0);
    for (int b = 0; b < bt.batch; ++b) {
        const auto& ids = batch[size_t(b)]->ids;
        if (int(ids.size()) != bt.seq_len) throw std::runtime_error("batch sequences must share one length");
        for (int t = 0; t < bt.seq_len; ++t) {
            bt.ids[size_t(b) * bt.seq_len + t] = ids[size_t(t)];
            if (t + 1 < bt.seq_len) {
                int tgt = ids[size_t(t) + 1];
                bool on = tgt != pad_id;
                if (answer_only && batch[size_t(b)]->answer_start >= 0 && t + 1 < batch[size_t(b)]->answer_start)
                    on = false;
                bt.targets[size_t(b) * bt.seq_len + t] = tgt;
                bt.mask[size_t(b) * bt.seq_len + t] = on ? 1 : 0;
            }
        }
    }
    return bt;
}

} // namespace

namespace {

// Per-worker reusable buffers; steady-state steps run allocation-free.
struct WorkerSpace {
    ForwardCache<float> cache;
    Parameters grads;
    RowMat<float> dlogits;

    void reset_grads_like(const Parameters& p) {
        bool same = true;
        std::vector<const RowMat<float>*> mine;
        grads.for_each([&mine](const std::string&, const RowMat<float>& m) { mine.push_back(&m); });
        size_t i = 0;
        p.for_each([&](const std::string&, const RowMat<float>& m) {
            if (i >= mine.size() || mine[i]->rows() != m.rows() || mine[i]->cols() != m.cols()) same = false;
            ++i;
        });
        if (!same || i != mine.size()) grads = Parameters::zeros_like(p);
        else grads.for_each([](const std::string&, RowMat<float>& m) { m.setZero(); });
    }
};

std::mutex g_worker_mu;
std::vector<std::unique_ptr<WorkerSpace>> g_workers;

} // namespace

GradResult compute_gradients(const Parameters& p, const ModelConfig& mc,
                             const std::vector<const TokenSeq*>& batch, int pad_id,
                             bool answer_only, uint64_t dropout_seed, int threads) {
    if (batch.empty()) throw std::runtime_error("compute_gradients: empty batch");
    const int B = int(batch.size());
    threads = std::max(1, std::min(threads, B));

    std::vector<WorkerSpace*> spaces;
    {
        std::lock_guard<std::mutex> lock(g_worker_mu);
        while (g_workers.size() < size_t(threads)) g_workers.push_back(std::make_unique<WorkerSpace>());
        for (int w = 0; w < threads; ++w) spaces.push_back(g_workers[size_t(w)].get());
    }

    // Each worker handles a contiguous sub-batch with per-example dropout
    // streams, producing unnormalized loss/grad sums.
    struct Part {
        double loss_sum = 0.0;
        int64_t n_mask = 0;
    };
    auto parts = std::vector<Part>(size_t(threads));
    std::string worker_error;
    std::mutex err_mu;
    auto worker = [&](int w) {
        try {
            WorkerSpace& ws = *spaces[size_t(w)];
            ws.reset_grads_like(p);
            int lo = w * B / threads, hi = (w + 1) * B / threads;
            if (lo == hi) return;
            std::vector<const TokenSeq*> sub(batch.begin() + lo, batch.begin() + hi);
            BatchTensors bt = assemble(sub, pad_id, answer_only);
            // Dropout streams are indexed by absolute batch position, so the
            // split into workers has no effect on the draws.
            RowMat<float> logits = forward_logits<float>(p, mc, bt.ids, bt.batch, bt.seq_len, true,
                                                         dropout_seed, &ws.cache, lo);
            int64_t n = 0;
            for (uint8_t m : bt.mask) n += m;
            if (n == 0) return;
            float mean_loss = cross_entropy_loss<float>(logits, bt.targets, bt.mask, &ws.dlogits);
            ws.dlogits *= float(n); // undo the 1/n inside to get raw sums
            if (!std::isfinite(mean_loss))
                throw std::runtime_error("compute_gradients: non-finite loss in sub-batch starting at index " +
                                         std::to_string(lo));
            parts[size_t(w)].loss_sum = double(mean_loss) * double(n);
            parts[size_t(w)].n_mask = n;
            backward_logits<float>(p, mc, ws.cache, ws.dlogits, ws.grads);
        } catch (const std::exception& ex) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (worker_error.empty()) worker_error = ex.what();
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    if (!worker_error.empty()) throw std::runtime_error(worker_error);

    GradResult out;
    out.grads = spaces[0]->grads;
    double loss_sum = parts[0].loss_sum;
    int64_t n_total = parts[0].n_mask;
    for (int w = 1; w < threads; ++w) {
        loss_sum += parts[size_t(w)].loss_sum;
        n_total += parts[size_t(w)].n_mask;
        size_t k = 0;
        std::vector<RowMat<float>*> dst;
        out.grads.for_each([&dst](const std::string&, RowMat<float>& t) { dst.push_back(&t); });
        spaces[size_t(w)]->grads.for_each([&](const std::string&, RowMat<float>& t) { *dst[k++] += t; });
    }
    if (n_total == 0) throw std::runtime_error("compute_gradients: nothing to learn from (all-PAD batch)");
    float inv = 1.0f / float(n_total);
    out.grads.for_each([inv](const std::string&, RowMat<float>& t) { t *= inv; });
    out.loss = loss_sum / double(n_total);
    return out;
}

// --- checkpoint io -----------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'A', 'R', 'D', 'Y', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
uint32_t read_u32(std::istream& is) { uint32_t v; is.read(reinterpret_cast<char*>(&v), 4); return v; }
uint64_t read_u64(std::istream& is) { uint64_t v; is.read(reinterpret_cast<char*>(&v), 8); return v; }

void write_string(std::ostream& os, const std::string& s) {
    write_u64(os, s.size());
    os.write(s.data(), std::streamsize(s.size()));
}
std::string read_string(std::istream& is) {
    uint64_t n = read_u64(is);
    std::string s(n, '\0');
    is.read(s.data(), std::streamsize(n));
    return s;
}

void write_params(std::ostream& os, const Parameters& p) {
    uint32_t count = 0;
    p.for_each([&count](const std::string&, const RowMat<float>&) { ++count; });
    write_u32(os, count);
    p.for_each([&os](const std::string& name, const RowMat<float>& m) {
        write_string(os, name);
        write_u64(os, uint64_t(m.rows()));
        write_u64(os, uint64_t(m.cols()));
        os.write(reinterpret_cast<const char*>(m.data()), std::streamsize(sizeof(float) * size_t(m.size())));
    });
}

void read_params_into(std::istream& is, Parameters& p) {
    uint32_t count = read_u32(is);
    std::vector<std::pair<std::string, RowMat<float>*>> slots;
    p.for_each([&slots](const std::string& name, RowMat<float>& m) { slots.emplace_back(name, &m); });
    if (slots.size() != count) throw std::runtime_error("checkpoint: tensor count mismatch");
    for (auto& [name, mat] : slots) {
        std::string got = read_string(is);
        if (got != name) throw std::runtime_error("checkpoint: expected tensor " + name + ", found " + got);
        uint64_t r = read_u64(is), c = read_u64(is);
        if (int64_t(r) != mat->rows() || int64_t(c) != mat->cols())
            throw std::runtime_error("checkpoint: shape mismatch for " + name);
        is.read(reinterpret_cast<char*>(mat->data()), std::streamsize(sizeof(float) * size_t(mat->size())));
    }
}

} // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    std::ofstream os(path + ".tmp", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
    os.write(kMagic, 8);
    write_u32(os, kVersion);
    write_string(os, ck.config_json);
    write_u64(os, uint64_t(ck.step));
    write_u64(os, ck.seed);
    write_params(os, ck.params);
    write_params(os, ck.opt.m);
    write_params(os, ck.opt.v);
    write_u64(os, uint64_t(ck.opt.step));
    os.flush();
    if (!os) throw std::runtime_error("failed writing checkpoint (disk full?): " + path);
    os.close();
    fs::rename(path + ".tmp", path);
}

Checkpoint load_checkpoint_with_shape(const std::string& path, const Parameters& shape) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("not a checkpoint file: " + path);
    uint32_t version = read_u32(is);
    if (version != kVersion) throw std::runtime_error("unsupported checkpoint version");
    Checkpoint ck;
    ck.config_json = read_string(is);
    ck.step = int64_t(read_u64(is));
    ck.seed = read_u64(is);
    ck.params = Parameters::zeros_like(shape);
    ck.opt.m = Parameters::zeros_like(shape);
    ck.opt.v = Parameters::zeros_like(shape);
    read_params_into(is, ck.params);
    read_params_into(is, ck.opt.m);
    read_params_into(is, ck.opt.v);
    ck.opt.step = int64_t(read_u64(is));
    if (!is) throw std::runtime_error("truncated checkpoint: " + path);
    return ck;
}

// Reads only the embedded config snapshot (callers rebuild shapes from it).
std::string peek_checkpoint_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("not a checkpoint file: " + path);
    read_u32(is);
    return read_string(is);
}

// --- training loop -----------------------------------------------------------

TrainResult run_training_loop(const ModelConfig& mc, const TrainConfig& tc,
                              const std::vector<TokenSeq>& data, const Vocab& vocab,
                              const std::vector<EvalHook>& hooks, const std::string& out_dir,
                              bool resume, const std::string& config_json) {
    tc.validate();
    mc.validate();
    if (data.empty()) throw std::runtime_error("training needs a dataset");

    Rng init_rng = Rng::stream(tc.seed, 0x1a17);
    Parameters params = init_parameters<float>(mc, init_rng);
    OptimizerState opt;
    opt.m = Parameters::zeros_like(params);
    opt.v = Parameters::zeros_like(params);
    int64_t start_step = 0;

    fs::path dir;
    if (!out_dir.empty()) {
        dir = out_dir;
        fs::create_directories(dir);
        if (resume) {
            int64_t best = -1;
            for (auto& entry : fs::directory_iterator(dir)) {
                auto name = entry.path().filename().string();
                if (name.rfind("ckpt_", 0) == 0 && name.size() > 9) {
                    int64_t s = std::stoll(name.substr(5, name.size() - 9));
                    best = std::max(best, s);
                }
            }
            if (best >= 0) {
                Checkpoint ck = load_checkpoint_with_shape((dir / ("ckpt_" + std::to_string(best) + ".bin")).string(), params);
                if (ck.config_json != config_json)
                    throw std::runtime_error("resume: run configuration differs from checkpoint snapshot");
                params = std::move(ck.params);
                opt = std::move(ck.opt);
                start_step = ck.step;
            }
        }
    }

    std::ofstream metrics_csv, mi_csv;
    std::vector<std::string> metric_cols, mi_cols;
    bool headers_written = false;
    auto open_csvs = [&](std::ios::openmode mode) {
        if (out_dir.empty()) return;
        metrics_csv.open(dir / "metrics.csv", mode);
        mi_csv.open(dir / "mi.csv", mode);
    };
    open_csvs(start_step > 0 ? std::ios::app : std::ios::trunc);
    if (start_step > 0) headers_written = true; // appended resumes keep the old header

    TrainResult result;
    double loss_accum = 0.0;
    int64_t loss_count = 0;
    double last_mean_loss = 0.0;

    auto run_eval = [&](int64_t step, double mean_loss) {
        std::map<std::string, double> row;
        row["step"] = double(step);
        row["loss"] = mean_loss;
        row["lr"] = lr_at(step, tc);
        for (const auto& h : hooks) {
            if (h.cadence > 1 && step % (tc.eval_every * h.cadence) != 0 && step != tc.max_iters) continue;
            auto m = h.fn(params, step);
            row.insert(m.begin(), m.end());
        }
        result.history.push_back(row);
        if (out_dir.empty()) return;
        if (!headers_written) {
            metric_cols.clear();
            mi_cols.clear();
            for (auto& [k, v] : row)
                (k.rfind("mi.", 0) == 0 ? mi_cols : metric_cols).push_back(k);
            auto emit = [](std::ofstream& os, const std::vector<std::string>& cols) {
                for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
                os << "\n";
            };
            emit(metrics_csv, metric_cols);
            if (!mi_cols.empty()) {
                mi_csv << "step";
                for (auto& c : mi_cols) mi_csv << "," << c;
                mi_csv << "\n";
            }
            headers_written = true;
        }
        for (size_t i = 0; i < metric_cols.size(); ++i) {
            auto it = row.find(metric_cols[i]);
            metrics_csv << (i ? "," : "");
            if (it != row.end()) metrics_csv << it->second;
        }
        metrics_csv << "\n";
        metrics_csv.flush();
        if (!mi_cols.empty()) {
            bool have = false;
            for (auto& c : mi_cols) have = have || row.count(c);
            if (have) {
                mi_csv << step;
                for (auto& c : mi_cols) {
                    mi_csv << ",";
                    auto it = row.find(c);
                    if (it != row.end()) mi_csv << it->second;
                }
                mi_csv << "\n";
                mi_csv.flush();
            }
        }
    };

    auto save_ck = [&](int64_t step) {
        if (out_dir.empty()) return;
        Checkpoint ck;
        ck.config_json = config_json;
        ck.step = step;
        ck.seed = tc.seed;
        ck.params = params;
        ck.opt = opt;
        save_checkpoint(ck, (dir / ("ckpt_" + std::to_string(step) + ".bin")).string());
    };

    const int64_t n_data = int64_t(data.size());
    if (start_step == 0) run_eval(0, 0.0);

    for (int64_t step = start_step; step < tc.max_iters; ++step) {
        // Batch selection is a pure function of (seed, step), so a resumed run
        // replays the identical data order.
        std::vector<const TokenSeq*> batch;
        batch.reserve(size_t(tc.batch_size));
        if (tc.epoch_mode) {
            // Deterministic shuffled epochs: epoch e uses a Fisher-Yates
            // permutation from stream (seed, "epoch", e).
            int64_t per_epoch = n_data / tc.batch_size;
            if (per_epoch == 0) throw std::runtime_error("epoch mode: dataset smaller than one batch");
            int64_t epoch = step / per_epoch, offset = (step % per_epoch) * tc.batch_size;
            static thread_local std::vector<int64_t> perm;
            static thread_local int64_t perm_epoch = -1;
            if (perm_epoch != epoch || int64_t(perm.size()) != n_data) {
                perm.resize(size_t(n_data));
                std::iota(perm.begin(), perm.end(), 0);
                Rng r = Rng::stream(tc.seed, 0xe90c, uint64_t(epoch));
                for (int64_t i = n_data - 1; i > 0; --i)
                    std::swap(perm[size_t(i)], perm[size_t(r.uniform(uint64_t(i + 1)))]);
                perm_epoch = epoch;
            }
            for (int b = 0; b < tc.batch_size; ++b) batch.push_back(&data[size_t(perm[size_t(offset + b)])]);
        } else {
            Rng r = Rng::stream(tc.seed, 0xba7c, uint64_t(step));
            for (int b = 0; b < tc.batch_size; ++b) batch.push_back(&data[size_t(r.uniform(uint64_t(n_data)))]);
        }

        uint64_t dropout_seed = Rng::stream(tc.seed, 0xd207, uint64_t(step)).next_u64();
        GradResult gr;
        try {
            gr = compute_gradients(params, mc, batch, vocab.pad_id, tc.answer_only_loss, dropout_seed, tc.threads);
        } catch (const std::exception& ex) {
            throw std::runtime_error("step " + std::to_string(step) + ": " + ex.what());
        }
        clip_global_norm(gr.grads, tc.grad_clip);
        adamw_update(opt, params, gr.grads, lr_at(step, tc), tc);

        loss_accum += gr.loss;
        loss_count += 1;
        int64_t done = step + 1;
        if (done % tc.eval_every == 0 || done == tc.max_iters) {
            last_mean_loss = loss_accum / double(loss_count);
            loss_accum = 0.0;
            loss_count = 0;
            run_eval(done, last_mean_loss);
        }
        if ((tc.checkpoint_every > 0 && done % tc.checkpoint_every == 0) || done == tc.max_iters)
            save_ck(done);
    }

    result.params = std::move(params);
    result.steps = tc.max_iters;
    result.final_loss = last_mean_loss;
    return result;
}

} // namespace arithdyn
