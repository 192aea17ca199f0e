#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "arithdyn/rng.hpp"
#include "arithdyn/vocab.hpp"

namespace arithdyn {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class PosScheme { Absolute, Rotary, RelativeBias };

std::string pos_scheme_name(PosScheme p);
PosScheme pos_scheme_from_name(const std::string& name);

struct ModelConfig {
    int n_layers = 6;
    int n_heads = 6;
    int d_model = 384;
    int max_seq_len = 21;
    int vocab_size = 15;
    float dropout = 0.2f;
    PosScheme pos = PosScheme::Absolute;
    int rel_buckets = 32;
    int rel_max_distance = 128;

    int head_dim() const { return d_model / n_heads; }
    void validate() const;
};

// Decoder-only transformer weights: pre-norm blocks, GELU MLP with 4x
// expansion, no linear biases, weight-only layer norms, output head tied to
// the token embedding.
template <typename T>
struct ParametersT {
    struct Layer {
        RowMat<T> ln1_w, ln2_w;   // [1, d]
        RowMat<T> w_qkv;          // [d, 3d]
        RowMat<T> w_attn_out;     // [d, d]
        RowMat<T> w_fc;           // [d, 4d]
        RowMat<T> w_mlp_out;      // [4d, d]
        RowMat<T> rel_bias;       // [buckets, heads]; only for RelativeBias
    };
    RowMat<T> tok_emb;            // [V, d]
    RowMat<T> pos_emb;            // [max_seq_len, d]; only for Absolute
    std::vector<Layer> layers;
    RowMat<T> lnf_w;              // [1, d]

    int64_t param_count() const;
    // Visits every tensor in a fixed order with a stable name.
    void for_each(const std::function<void(const std::string&, RowMat<T>&)>& fn);
    void for_each(const std::function<void(const std::string&, const RowMat<T>&)>& fn) const;
    static ParametersT zeros_like(const ParametersT& other);
};

using Parameters = ParametersT<float>;

template <typename T>
ParametersT<T> init_parameters(const ModelConfig& cfg, Rng& rng);

// Per-layer activation cache for the backward pass.
template <typename T>
struct ForwardCache;

// Runs the causal forward pass over a right-padded batch. `ids` is a
// flattened [batch, seq_len] token matrix. Returns logits [batch*seq_len, V].
// In train mode, dropout is driven by per-example streams derived from
// (dropout_seed, example index).
template <typename T>
RowMat<T> forward_logits(const ParametersT<T>& p, const ModelConfig& cfg,
                         const std::vector<int>& ids, int batch, int seq_len,
                         bool train_mode, uint64_t dropout_seed,
                         ForwardCache<T>* cache = nullptr, int example_offset = 0);

// Backpropagates dlogits through the cached forward pass, accumulating into
// `grads` (which must be zeros_like-shaped). Reuses the cache's scratch
// buffers, hence the mutable reference.
template <typename T>
void backward_logits(const ParametersT<T>& p, const ModelConfig& cfg, ForwardCache<T>& cache,
                     const RowMat<T>& dlogits, ParametersT<T>& grads);

// Rotates query/key head vectors by position-dependent angles; inverse=true
// applies the transpose rotation (used by the backward pass). The Ref form
// accepts matrix blocks without a copy.
template <typename T>
void apply_rotary(Eigen::Ref<RowMat<T>, 0, Eigen::OuterStride<>> head_vecs, int first_pos,
                  bool inverse = false);
template <typename T>
void apply_rotary(RowMat<T>& head_vecs, int first_pos, bool inverse = false) {
    apply_rotary<T>(Eigen::Ref<RowMat<T>, 0, Eigen::OuterStride<>>(head_vecs), first_pos, inverse);
}

// Canonical one-sided relative-position bucket: rel = key_pos - query_pos
// (<= 0 for causal attention). Exact half of the buckets index small
// distances directly; the rest grow logarithmically and saturate at
// max_distance.
int relative_bias_bucket(int rel, int num_buckets = 32, int max_distance = 128);

// Mean negative log-likelihood of targets over masked positions; optionally
// emits dloss/dlogits. Throws if the mask is empty.
template <typename T>
T cross_entropy_loss(const RowMat<T>& logits, const std::vector<int>& targets,
                     const std::vector<uint8_t>& mask, RowMat<T>* dlogits = nullptr);

// Activation cache doubling as a reusable workspace: repeated calls with the
// same shapes do not reallocate.
template <typename T>
struct ForwardCache {
    int batch = 0, seq_len = 0;
    std::vector<int> ids;
    RowMat<T> emb_drop_mask;
    struct LayerCache {
        RowMat<T> ln1_xhat, ln2_xhat;   // [BL, d]
        RowMat<T> ln1_rstd, ln2_rstd;   // [BL, 1]
        RowMat<T> x_in, x_mid;          // residual stream entering each sub-block
        RowMat<T> qkv;                  // [BL, 3d] (post-rotary)
        std::vector<RowMat<T>> att;     // per (b,h): [L, L] pre-dropout probs
        std::vector<RowMat<T>> att_drop_mask;
        RowMat<T> ctx;                  // [BL, d]
        RowMat<T> attn_resid_mask, mlp_resid_mask;
        RowMat<T> fc;                   // [BL, 4d] pre-activation
        RowMat<T> act;                  // [BL, 4d]
        RowMat<T> y1, y2, attn_out, mlp_out; // forward scratch
    };
    std::vector<LayerCache> layers;
    RowMat<T> x;                        // residual stream
    RowMat<T> lnf_xhat, lnf_rstd, xf;
    bool train_mode = false;
    // backward scratch
    RowMat<T> bw_dact, bw_dfc, bw_dy, bw_dqkv, bw_dx, bw_dx2, bw_tmp;
};

} // namespace arithdyn
