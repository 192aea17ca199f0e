#include "arithdyn/model.hpp"

#include <cmath>
#include <stdexcept>

namespace arithdyn {

std::string pos_scheme_name(PosScheme p) {
    switch (p) {
    case PosScheme::Absolute: return "absolute";
    case PosScheme::Rotary: return "rotary";
    case PosScheme::RelativeBias: return "relative";
    }
    return "?";
}

PosScheme pos_scheme_from_name(const std::string& name) {
    if (name == "absolute") return PosScheme::Absolute;
    if (name == "rotary") return PosScheme::Rotary;
    if (name == "relative" || name == "relative-bias") return PosScheme::RelativeBias;
    throw std::runtime_error("unknown positional scheme '" + name + "'");
}

void ModelConfig::validate() const {
    if (d_model % n_heads != 0) throw std::runtime_error("d_model must be divisible by n_heads");
    if (dropout < 0.0f || dropout >= 1.0f) throw std::runtime_error("dropout must be in [0,1)");
    if (pos == PosScheme::Rotary && head_dim() % 2 != 0)
        throw std::runtime_error("rotary positions need an even head dimension");
    if (n_layers < 1 || n_heads < 1 || d_model < 1 || max_seq_len < 1 || vocab_size < 2)
        throw std::runtime_error("model config has non-positive dimensions");
}

template <typename T>
int64_t ParametersT<T>::param_count() const {
    int64_t n = 0;
    const_cast<ParametersT<T>*>(this)->for_each([&n](const std::string&, RowMat<T>& m) { n += m.size(); });
    return n;
}

template <typename T>
void ParametersT<T>::for_each(const std::function<void(const std::string&, RowMat<T>&)>& fn) {
    fn("tok_emb", tok_emb);
    if (pos_emb.size()) fn("pos_emb", pos_emb);
    for (size_t l = 0; l < layers.size(); ++l) {
        auto& L = layers[l];
        const std::string p = "layer" + std::to_string(l) + ".";
        fn(p + "ln1_w", L.ln1_w);
        fn(p + "w_qkv", L.w_qkv);
        fn(p + "w_attn_out", L.w_attn_out);
        fn(p + "ln2_w", L.ln2_w);
        fn(p + "w_fc", L.w_fc);
        fn(p + "w_mlp_out", L.w_mlp_out);
        if (L.rel_bias.size()) fn(p + "rel_bias", L.rel_bias);
    }
    fn("lnf_w", lnf_w);
}

template <typename T>
void ParametersT<T>::for_each(const std::function<void(const std::string&, const RowMat<T>&)>& fn) const {
    const_cast<ParametersT<T>*>(this)->for_each(
        [&fn](const std::string& name, RowMat<T>& m) { fn(name, m); });
}

template <typename T>
ParametersT<T> ParametersT<T>::zeros_like(const ParametersT<T>& other) {
    ParametersT<T> out = other;
    out.for_each([](const std::string&, RowMat<T>& m) { m.setZero(); });
    return out;
}

template <typename T>
ParametersT<T> init_parameters(const ModelConfig& cfg, Rng& rng) {
    cfg.validate();
    ParametersT<T> p;
    const int d = cfg.d_model;
    p.tok_emb.resize(cfg.vocab_size, d);
    if (cfg.pos == PosScheme::Absolute) p.pos_emb.resize(cfg.max_seq_len, d);
    p.layers.resize(size_t(cfg.n_layers));
    for (auto& L : p.layers) {
        L.ln1_w.resize(1, d);
        L.ln2_w.resize(1, d);
        L.w_qkv.resize(d, 3 * d);
        L.w_attn_out.resize(d, d);
        L.w_fc.resize(d, 4 * d);
        L.w_mlp_out.resize(4 * d, d);
        if (cfg.pos == PosScheme::RelativeBias) L.rel_bias.resize(cfg.rel_buckets, cfg.n_heads);
    }
    p.lnf_w.resize(1, d);

    const T base_std = T(0.02);
    // Residual-branch projections start smaller, scaled down with depth.
    const T resid_std = T(0.02 / std::sqrt(2.0 * cfg.n_layers));
    p.for_each([&](const std::string& name, RowMat<T>& m) {
        if (name.find("ln") != std::string::npos) {
            m.setOnes();
            return;
        }
        T std = (name.find("w_attn_out") != std::string::npos || name.find("w_mlp_out") != std::string::npos)
                    ? resid_std
                    : base_std;
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = T(rng.normal()) * std;
    });
    return p;
}

int relative_bias_bucket(int rel, int num_buckets, int max_distance) {
    // One-sided (causal) variant: rel = key_pos - query_pos, non-positive for
    // visible positions; anything at or beyond the query collapses to 0.
    int n = rel < 0 ? -rel : 0;
    const int max_exact = num_buckets / 2;
    if (n < max_exact) return n;
    int bucket = max_exact +
                 int(std::log(double(n) / max_exact) / std::log(double(max_distance) / max_exact) *
                     (num_buckets - max_exact));
    return std::min(bucket, num_buckets - 1);
}

template <typename T>
void apply_rotary(Eigen::Ref<RowMat<T>, 0, Eigen::OuterStride<>> head_vecs, int first_pos, bool inverse) {
    const int hd = int(head_vecs.cols());
    if (hd % 2 != 0) throw std::runtime_error("rotary: head dimension must be even");
    const int half = hd / 2;
    for (Eigen::Index r = 0; r < head_vecs.rows(); ++r) {
        const double pos = double(first_pos + int(r));
        for (int j = 0; j < half; ++j) {
            const double angle = pos * std::pow(10000.0, -2.0 * j / hd);
            const T c = T(std::cos(angle));
            const T s = T(inverse ? -std::sin(angle) : std::sin(angle));
            const T x = head_vecs(r, j);
            const T y = head_vecs(r, j + half);
            head_vecs(r, j) = x * c - y * s;
            head_vecs(r, j + half) = x * s + y * c;
        }
    }
}

namespace {

template <typename T>
void layer_norm_forward(const RowMat<T>& x, const RowMat<T>& w, RowMat<T>& xhat, RowMat<T>& rstd,
                        RowMat<T>& y) {
    const T eps = T(1e-5);
    const Eigen::Index n = x.rows(), d = x.cols();
    xhat.resize(n, d);
    rstd.resize(n, 1);
    y.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        T mean = x.row(i).mean();
        T var = (x.row(i).array() - mean).square().mean();
        T rs = T(1) / std::sqrt(var + eps);
        rstd(i, 0) = rs;
        xhat.row(i) = (x.row(i).array() - mean) * rs;
        y.row(i) = xhat.row(i).array() * w.array();
    }
}

template <typename T>
void layer_norm_backward(const RowMat<T>& dy, const RowMat<T>& xhat, const RowMat<T>& rstd,
                         const RowMat<T>& w, RowMat<T>& dx, RowMat<T>& dw) {
    const Eigen::Index n = dy.rows(), d = dy.cols();
    dx.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto dxhat = (dy.row(i).array() * w.array()).eval();
        T m1 = dxhat.mean();
        T m2 = (dxhat * xhat.row(i).array()).mean();
        dx.row(i) = ((dxhat - m1 - xhat.row(i).array() * m2) * rstd(i, 0)).matrix();
        dw.array() += dy.row(i).array() * xhat.row(i).array();
    }
}

// Vectorized tanh-approximation GELU over whole matrices.
template <typename T>
void gelu_matrix(const RowMat<T>& x, RowMat<T>& out) {
    const T c = T(0.7978845608028654); // sqrt(2/pi)
    auto xv = x.array();
    out = (T(0.5) * xv * (T(1) + (c * (xv + T(0.044715) * xv.cube())).tanh())).matrix();
}

template <typename T>
void gelu_grad_matrix(const RowMat<T>& x, RowMat<T>& out) {
    const T c = T(0.7978845608028654);
    auto xv = x.array();
    auto t = (c * (xv + T(0.044715) * xv.cube())).tanh();
    auto du = c * (T(1) + T(3) * T(0.044715) * xv.square());
    out = (T(0.5) * (T(1) + t) + T(0.5) * xv * (T(1) - t.square()) * du).matrix();
}

template <typename T>
RowMat<T> dropout_mask(Rng& rng, Eigen::Index rows, Eigen::Index cols, float p) {
    RowMat<T> m(rows, cols);
    const T keep = T(1) / T(1.0f - p);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = (rng.uniform01f() >= p) ? keep : T(0);
    return m;
}

} // namespace

template <typename T>
RowMat<T> forward_logits(const ParametersT<T>& p, const ModelConfig& cfg,
                         const std::vector<int>& ids, int batch, int seq_len,
                         bool train_mode, uint64_t dropout_seed, ForwardCache<T>* cache,
                         int example_offset) {
    if (int(ids.size()) != batch * seq_len) throw std::runtime_error("forward: ids size mismatch");
    if (seq_len > cfg.max_seq_len)
        throw std::runtime_error("forward: sequence length " + std::to_string(seq_len) +
                                 " exceeds max " + std::to_string(cfg.max_seq_len));
    const int d = cfg.d_model, H = cfg.n_heads, hd = cfg.head_dim(), L = seq_len;
    const Eigen::Index BL = Eigen::Index(batch) * L;
    const bool drop = train_mode && cfg.dropout > 0.0f;

    // The cache doubles as a workspace; steady-state calls reuse every buffer.
    static thread_local ForwardCache<T> local;
    ForwardCache<T>& cc = cache ? *cache : local;
    cc.batch = batch;
    cc.seq_len = L;
    cc.ids = ids;
    cc.train_mode = drop;
    if (cc.layers.size() != size_t(cfg.n_layers)) cc.layers.assign(size_t(cfg.n_layers), {});

    std::vector<Rng> streams;
    if (drop) {
        streams.reserve(size_t(batch));
        for (int b = 0; b < batch; ++b) streams.push_back(Rng::stream(dropout_seed, uint64_t(example_offset + b)));
    }

    RowMat<T>& x = cc.x;
    x.resize(BL, d);
    for (Eigen::Index i = 0; i < BL; ++i) {
        int id = ids[size_t(i)];
        if (id < 0 || id >= cfg.vocab_size) throw std::runtime_error("forward: token id out of range");
        if (cfg.pos == PosScheme::Absolute) x.row(i) = p.tok_emb.row(id) + p.pos_emb.row(int(i) % L);
        else x.row(i) = p.tok_emb.row(id);
    }
    if (drop) {
        cc.emb_drop_mask.resize(BL, d);
        for (int b = 0; b < batch; ++b)
            cc.emb_drop_mask.middleRows(Eigen::Index(b) * L, L) = dropout_mask<T>(streams[size_t(b)], L, d, cfg.dropout);
        x.array() *= cc.emb_drop_mask.array();
    }

    const T scale = T(1) / std::sqrt(T(hd));
    for (int l = 0; l < cfg.n_layers; ++l) {
        auto& P = p.layers[size_t(l)];
        auto& lc = cc.layers[size_t(l)];
        lc.x_in = x;

        layer_norm_forward(x, P.ln1_w, lc.ln1_xhat, lc.ln1_rstd, lc.y1);
        lc.qkv.resize(BL, 3 * d);
        lc.qkv.noalias() = lc.y1 * P.w_qkv;
        if (cfg.pos == PosScheme::Rotary) {
            for (int b = 0; b < batch; ++b)
                for (int h = 0; h < H; ++h) {
                    Eigen::Ref<RowMat<T>, 0, Eigen::OuterStride<>> q =
                        lc.qkv.block(Eigen::Index(b) * L, h * hd, L, hd);
                    Eigen::Ref<RowMat<T>, 0, Eigen::OuterStride<>> k =
                        lc.qkv.block(Eigen::Index(b) * L, d + h * hd, L, hd);
                    apply_rotary<T>(q, 0);
                    apply_rotary<T>(k, 0);
                }
        }

        if (lc.att.size() != size_t(batch) * H) lc.att.assign(size_t(batch) * H, {});
        if (drop && lc.att_drop_mask.size() != size_t(batch) * H) lc.att_drop_mask.assign(size_t(batch) * H, {});
        lc.ctx.resize(BL, d);
        RowMat<T> S;
        RowMat<T> pd;
        if (drop)
            for (int b = 0; b < batch; ++b)
                for (int h = 0; h < H; ++h)
                    lc.att_drop_mask[size_t(b) * H + size_t(h)] = dropout_mask<T>(streams[size_t(b)], L, L, cfg.dropout);
        for (int b = 0; b < batch; ++b) {
            for (int h = 0; h < H; ++h) {
                auto Q = lc.qkv.block(Eigen::Index(b) * L, h * hd, L, hd);
                auto K = lc.qkv.block(Eigen::Index(b) * L, d + h * hd, L, hd);
                auto V = lc.qkv.block(Eigen::Index(b) * L, 2 * d + h * hd, L, hd);
                S.resize(L, L);
                S.noalias() = Q * K.transpose();
                S *= scale;
                if (cfg.pos == PosScheme::RelativeBias) {
                    for (int i = 0; i < L; ++i)
                        for (int j = 0; j <= i; ++j)
                            S(i, j) += P.rel_bias(relative_bias_bucket(j - i, cfg.rel_buckets, cfg.rel_max_distance), h);
                }
                RowMat<T>& probs = lc.att[size_t(b) * H + size_t(h)];
                probs.resize(L, L);
                for (int i = 0; i < L; ++i) {
                    auto seg = S.row(i).segment(0, i + 1).array();
                    T mx = seg.maxCoeff();
                    probs.row(i).segment(0, i + 1) = (seg - mx).exp();
                    T sum = probs.row(i).segment(0, i + 1).sum();
                    probs.row(i).segment(0, i + 1) /= sum;
                    if (i + 1 < L) probs.row(i).segment(i + 1, L - i - 1).setZero();
                }
                if (drop) {
                    pd = (probs.array() * lc.att_drop_mask[size_t(b) * H + size_t(h)].array()).matrix();
                    lc.ctx.block(Eigen::Index(b) * L, h * hd, L, hd).noalias() = pd * V;
                } else {
                    lc.ctx.block(Eigen::Index(b) * L, h * hd, L, hd).noalias() = probs * V;
                }
            }
        }
        lc.attn_out.resize(BL, d);
        lc.attn_out.noalias() = lc.ctx * P.w_attn_out;
        if (drop) {
            lc.attn_resid_mask.resize(BL, d);
            for (int b = 0; b < batch; ++b)
                lc.attn_resid_mask.middleRows(Eigen::Index(b) * L, L) = dropout_mask<T>(streams[size_t(b)], L, d, cfg.dropout);
            lc.attn_out.array() *= lc.attn_resid_mask.array();
        }
        x += lc.attn_out;
        lc.x_mid = x;

        layer_norm_forward(x, P.ln2_w, lc.ln2_xhat, lc.ln2_rstd, lc.y2);
        lc.fc.resize(BL, 4 * d);
        lc.fc.noalias() = lc.y2 * P.w_fc;
        gelu_matrix(lc.fc, lc.act);
        lc.mlp_out.resize(BL, d);
        lc.mlp_out.noalias() = lc.act * P.w_mlp_out;
        if (drop) {
            lc.mlp_resid_mask.resize(BL, d);
            for (int b = 0; b < batch; ++b)
                lc.mlp_resid_mask.middleRows(Eigen::Index(b) * L, L) = dropout_mask<T>(streams[size_t(b)], L, d, cfg.dropout);
            lc.mlp_out.array() *= lc.mlp_resid_mask.array();
        }
        x += lc.mlp_out;
    }

    layer_norm_forward(x, p.lnf_w, cc.lnf_xhat, cc.lnf_rstd, cc.xf);
    RowMat<T> logits;
    logits.noalias() = cc.xf * p.tok_emb.transpose();
    return logits;
}

template <typename T>
void backward_logits(const ParametersT<T>& p, const ModelConfig& cfg, ForwardCache<T>& cc,
                     const RowMat<T>& dlogits, ParametersT<T>& grads) {
    const int d = cfg.d_model, H = cfg.n_heads, hd = cfg.head_dim(), L = cc.seq_len;
    const int batch = cc.batch;
    const Eigen::Index BL = Eigen::Index(batch) * L;
    const bool drop = cc.train_mode;
    const T scale = T(1) / std::sqrt(T(hd));

    // Output head (tied with the token embedding), reading the cached xf.
    grads.tok_emb.noalias() += dlogits.transpose() * cc.xf;
    RowMat<T>& dy = cc.bw_dy;
    dy.resize(BL, d);
    dy.noalias() = dlogits * p.tok_emb;

    RowMat<T>& dx = cc.bw_dx;
    RowMat<T>& dx_mid = cc.bw_dx2;
    RowMat<T>& tmp = cc.bw_tmp;
    RowMat<T> dln_w = RowMat<T>::Zero(1, d);
    layer_norm_backward(dy, cc.lnf_xhat, cc.lnf_rstd, p.lnf_w, dx, dln_w);
    grads.lnf_w += dln_w;

    RowMat<T>& dact = cc.bw_dact;
    RowMat<T>& dfc = cc.bw_dfc;
    RowMat<T>& dqkv = cc.bw_dqkv;
    RowMat<T> dP, dS, dQ, dK, pd;

    for (int l = cfg.n_layers - 1; l >= 0; --l) {
        auto& P = p.layers[size_t(l)];
        auto& G = grads.layers[size_t(l)];
        auto& lc = cc.layers[size_t(l)];

        // MLP branch; tmp plays dmlp here.
        tmp = dx;
        if (drop) tmp.array() *= lc.mlp_resid_mask.array();
        dact.resize(BL, 4 * d);
        dact.noalias() = tmp * P.w_mlp_out.transpose();
        G.w_mlp_out.noalias() += lc.act.transpose() * tmp;
        gelu_grad_matrix(lc.fc, dfc);
        dfc.array() *= dact.array();
        dy.noalias() = dfc * P.w_fc.transpose();
        G.w_fc.noalias() += lc.y2.transpose() * dfc;
        dln_w.setZero();
        layer_norm_backward(dy, lc.ln2_xhat, lc.ln2_rstd, P.ln2_w, dx_mid, dln_w);
        G.ln2_w += dln_w;
        dx_mid += dx;

        // Attention branch; tmp becomes dattn_out, then dctx.
        tmp = dx_mid;
        if (drop) tmp.array() *= lc.attn_resid_mask.array();
        G.w_attn_out.noalias() += lc.ctx.transpose() * tmp;
        RowMat<T>& dctx = dy; // safe: dy is dead until the qkv backprop below
        dctx.noalias() = tmp * P.w_attn_out.transpose();

        dqkv.resize(BL, 3 * d);
        dqkv.setZero();
        for (int b = 0; b < batch; ++b) {
            for (int h = 0; h < H; ++h) {
                auto Q = lc.qkv.block(Eigen::Index(b) * L, h * hd, L, hd);
                auto K = lc.qkv.block(Eigen::Index(b) * L, d + h * hd, L, hd);
                auto V = lc.qkv.block(Eigen::Index(b) * L, 2 * d + h * hd, L, hd);
                const RowMat<T>& probs = lc.att[size_t(b) * H + size_t(h)];
                auto dctx_b = dctx.block(Eigen::Index(b) * L, h * hd, L, hd);

                dP.resize(L, L);
                dP.noalias() = dctx_b * V.transpose();
                if (drop) {
                    pd = (probs.array() * lc.att_drop_mask[size_t(b) * H + size_t(h)].array()).matrix();
                    dqkv.block(Eigen::Index(b) * L, 2 * d + h * hd, L, hd).noalias() = pd.transpose() * dctx_b;
                    dP.array() *= lc.att_drop_mask[size_t(b) * H + size_t(h)].array();
                } else {
                    dqkv.block(Eigen::Index(b) * L, 2 * d + h * hd, L, hd).noalias() = probs.transpose() * dctx_b;
                }

                // Softmax backward within each causal row.
                dS.resize(L, L);
                for (int i = 0; i < L; ++i) {
                    auto pseg = probs.row(i).segment(0, i + 1).array();
                    auto dseg = dP.row(i).segment(0, i + 1).array();
                    T dot = (pseg * dseg).sum();
                    dS.row(i).segment(0, i + 1) = (pseg * (dseg - dot)).matrix();
                    if (i + 1 < L) dS.row(i).segment(i + 1, L - i - 1).setZero();
                }
                if (cfg.pos == PosScheme::RelativeBias) {
                    for (int i = 0; i < L; ++i)
                        for (int j = 0; j <= i; ++j)
                            G.rel_bias(relative_bias_bucket(j - i, cfg.rel_buckets, cfg.rel_max_distance), h) += dS(i, j);
                }
                dQ.resize(L, hd);
                dQ.noalias() = dS * K;
                dQ *= scale;
                dK.resize(L, hd);
                dK.noalias() = dS.transpose() * Q;
                dK *= scale;
                if (cfg.pos == PosScheme::Rotary) {
                    apply_rotary<T>(dQ, 0, true);
                    apply_rotary<T>(dK, 0, true);
                }
                dqkv.block(Eigen::Index(b) * L, h * hd, L, hd) = dQ;
                dqkv.block(Eigen::Index(b) * L, d + h * hd, L, hd) = dK;
            }
        }

        dy.noalias() = dqkv * P.w_qkv.transpose();
        G.w_qkv.noalias() += lc.y1.transpose() * dqkv;
        dln_w.setZero();
        layer_norm_backward(dy, lc.ln1_xhat, lc.ln1_rstd, P.ln1_w, dx, dln_w);
        G.ln1_w += dln_w;
        dx += dx_mid;
    }

    if (drop) dx.array() *= cc.emb_drop_mask.array();
    for (Eigen::Index i = 0; i < BL; ++i) {
        grads.tok_emb.row(cc.ids[size_t(i)]) += dx.row(i);
        if (cfg.pos == PosScheme::Absolute) grads.pos_emb.row(int(i) % L) += dx.row(i);
    }
}

template <typename T>
T cross_entropy_loss(const RowMat<T>& logits, const std::vector<int>& targets,
                     const std::vector<uint8_t>& mask, RowMat<T>* dlogits) {
    if (int(targets.size()) != logits.rows() || mask.size() != targets.size())
        throw std::runtime_error("cross_entropy_loss: shape mismatch");
    int64_t n = 0;
    for (uint8_t m : mask) n += m ? 1 : 0;
    if (n == 0) throw std::runtime_error("cross_entropy_loss: empty mask");
    if (dlogits) *dlogits = RowMat<T>::Zero(logits.rows(), logits.cols());
    T loss = 0;
    const Eigen::Index V = logits.cols();
    Eigen::Array<T, 1, Eigen::Dynamic> row(V);
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        if (!mask[size_t(i)]) continue;
        T mx = logits.row(i).maxCoeff();
        row = (logits.row(i).array() - mx).exp();
        T lse = mx + std::log(row.sum());
        int tgt = targets[size_t(i)];
        loss += lse - logits(i, tgt);
        if (dlogits) {
            dlogits->row(i) = (row / (row.sum() * T(n))).matrix();
            (*dlogits)(i, tgt) -= T(1) / T(n);
        }
    }
    return loss / T(n);
}

template struct ParametersT<float>;
template struct ParametersT<double>;
template ParametersT<float> init_parameters<float>(const ModelConfig&, Rng&);
template ParametersT<double> init_parameters<double>(const ModelConfig&, Rng&);
template RowMat<float> forward_logits<float>(const ParametersT<float>&, const ModelConfig&,
                                             const std::vector<int>&, int, int, bool, uint64_t,
                                             ForwardCache<float>*, int);
template RowMat<double> forward_logits<double>(const ParametersT<double>&, const ModelConfig&,
                                               const std::vector<int>&, int, int, bool, uint64_t,
                                               ForwardCache<double>*, int);
template void backward_logits<float>(const ParametersT<float>&, const ModelConfig&,
                                     ForwardCache<float>&, const RowMat<float>&, ParametersT<float>&);
template void backward_logits<double>(const ParametersT<double>&, const ModelConfig&,
                                      ForwardCache<double>&, const RowMat<double>&, ParametersT<double>&);
template void apply_rotary<float>(Eigen::Ref<RowMat<float>, 0, Eigen::OuterStride<>>, int, bool);
template void apply_rotary<double>(Eigen::Ref<RowMat<double>, 0, Eigen::OuterStride<>>, int, bool);
template float cross_entropy_loss<float>(const RowMat<float>&, const std::vector<int>&,
                                         const std::vector<uint8_t>&, RowMat<float>*);
template double cross_entropy_loss<double>(const RowMat<double>&, const std::vector<int>&,
                                           const std::vector<uint8_t>&, RowMat<double>*);

} // namespace arithdyn
