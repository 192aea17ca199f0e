#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "arithdyn/model.hpp"
#include "arithdyn/rng.hpp"

using namespace arithdyn;

namespace {

ModelConfig tiny_cfg(PosScheme pos = PosScheme::Absolute) {
    ModelConfig cfg;
    cfg.n_layers = 1;
    cfg.n_heads = 2;
    cfg.d_model = 8;
    cfg.max_seq_len = 8;
    cfg.vocab_size = 15;
    cfg.dropout = 0.0f;
    cfg.pos = pos;
    return cfg;
}

int64_t closed_form_count(const ModelConfig& c) {
    int64_t d = c.d_model;
    int64_t n = int64_t(c.vocab_size) * d + d; // token embedding + final ln
    if (c.pos == PosScheme::Absolute) n += int64_t(c.max_seq_len) * d;
    int64_t per_layer = 2 * d + 3 * d * d + d * d + 4 * d * d + 4 * d * d;
    if (c.pos == PosScheme::RelativeBias) per_layer += int64_t(c.rel_buckets) * c.n_heads;
    return n + c.n_layers * per_layer;
}

} // namespace

TEST_CASE("parameter counts") {
    ModelConfig ref;
    ref.n_layers = 6;
    ref.n_heads = 6;
    ref.d_model = 384;
    ref.max_seq_len = 21;
    ref.vocab_size = 15;
    Rng rng(1);
    auto p = init_parameters<float>(ref, rng);
    // Published total is 10.63M; head tying keeps us within 5%.
    CHECK(std::abs(double(p.param_count()) - 10.63e6) / 10.63e6 < 0.05);
    CHECK(p.param_count() == closed_form_count(ref));

    for (PosScheme pos : {PosScheme::Absolute, PosScheme::Rotary, PosScheme::RelativeBias}) {
        ModelConfig c = tiny_cfg(pos);
        Rng r2(3);
        auto q = init_parameters<float>(c, r2);
        CHECK(q.param_count() == closed_form_count(c));
    }
}

TEST_CASE("init is deterministic in the seed") {
    ModelConfig cfg = tiny_cfg();
    Rng a(7), b(7), c(8);
    auto pa = init_parameters<float>(cfg, a);
    auto pb = init_parameters<float>(cfg, b);
    auto pc = init_parameters<float>(cfg, c);
    CHECK(pa.tok_emb == pb.tok_emb);
    CHECK(pa.layers[0].w_qkv == pb.layers[0].w_qkv);
    CHECK(pa.tok_emb != pc.tok_emb);
}

TEST_CASE("config validation") {
    ModelConfig bad = tiny_cfg();
    bad.d_model = 9; // not divisible by 2 heads
    CHECK_THROWS_AS(bad.validate(), std::runtime_error);
    ModelConfig rot = tiny_cfg(PosScheme::Rotary);
    rot.n_heads = 8; // head_dim 1 is odd
    CHECK_THROWS_AS(rot.validate(), std::runtime_error);
    ModelConfig dp = tiny_cfg();
    dp.dropout = 1.0f;
    CHECK_THROWS_AS(dp.validate(), std::runtime_error);
}

TEST_CASE("causality: logits before a perturbed position are bit-identical") {
    for (PosScheme pos : {PosScheme::Absolute, PosScheme::Rotary, PosScheme::RelativeBias}) {
        CAPTURE(pos_scheme_name(pos));
        ModelConfig cfg = tiny_cfg(pos);
        Rng rng(11);
        auto p = init_parameters<float>(cfg, rng);
        std::vector<int> ids = {1, 2, 3, 4, 5, 6};
        auto base = forward_logits<float>(p, cfg, ids, 1, 6, false, 0);
        for (int t = 1; t < 6; ++t) {
            std::vector<int> mod = ids;
            mod[size_t(t)] = (mod[size_t(t)] + 7) % cfg.vocab_size;
            auto out = forward_logits<float>(p, cfg, mod, 1, 6, false, 0);
            for (int q = 0; q < t; ++q)
                for (int vtok = 0; vtok < cfg.vocab_size; ++vtok)
                    CHECK(out(q, vtok) == base(q, vtok));
            bool changed = false;
            for (int vtok = 0; vtok < cfg.vocab_size; ++vtok) changed = changed || out(t, vtok) != base(t, vtok);
            CHECK(changed);
        }
    }
}

TEST_CASE("single-token forward and repeatability") {
    ModelConfig cfg = tiny_cfg();
    Rng rng(13);
    auto p = init_parameters<float>(cfg, rng);
    std::vector<int> one = {3};
    auto l1 = forward_logits<float>(p, cfg, one, 1, 1, false, 0);
    CHECK(l1.rows() == 1);
    CHECK(l1.cols() == cfg.vocab_size);
    auto l2 = forward_logits<float>(p, cfg, one, 1, 1, false, 0);
    CHECK(l1 == l2);
    CHECK_THROWS_AS(forward_logits<float>(p, cfg, std::vector<int>(9, 0), 1, 9, false, 0), std::runtime_error);
}

TEST_CASE("attention rows are probability distributions") {
    for (PosScheme pos : {PosScheme::Absolute, PosScheme::Rotary, PosScheme::RelativeBias}) {
        ModelConfig cfg = tiny_cfg(pos);
        Rng rng(17);
        auto p = init_parameters<float>(cfg, rng);
        std::vector<int> ids = {0, 5, 9, 11, 2, 7};
        ForwardCache<float> cache;
        forward_logits<float>(p, cfg, ids, 1, 6, false, 0, &cache);
        for (const auto& att : cache.layers[0].att) {
            for (int i = 0; i < 6; ++i) {
                float sum = 0;
                for (int j = 0; j < 6; ++j) {
                    sum += att(i, j);
                    if (j > i) CHECK(att(i, j) == 0.0f);
                }
                CHECK(std::abs(sum - 1.0f) < 1e-5f);
            }
        }
    }
}

TEST_CASE("rotary transform properties") {
    // Position 0 is the identity rotation.
    RowMat<double> v(1, 8);
    v << 1, 2, 3, 4, 5, 6, 7, 8;
    RowMat<double> v0 = v;
    apply_rotary(v0, 0);
    CHECK((v0 - v).cwiseAbs().maxCoeff() < 1e-12);

    // Norms are preserved at every position.
    Rng rng(23);
    RowMat<double> q(16, 8);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 8; ++j) q(i, j) = rng.normal();
    RowMat<double> qr = q;
    apply_rotary(qr, 0);
    for (int i = 0; i < 16; ++i)
        CHECK(std::abs(qr.row(i).norm() - q.row(i).norm()) < 1e-9);

    // Inverse rotation undoes the forward rotation.
    RowMat<double> back = qr;
    apply_rotary(back, 0, true);
    CHECK((back - q).cwiseAbs().maxCoeff() < 1e-9);

    // Scores depend only on the relative offset: shifting both positions by
    // the same amount leaves the dot product unchanged.
    RowMat<double> qq(1, 8), kk(1, 8);
    for (int j = 0; j < 8; ++j) {
        qq(0, j) = rng.normal();
        kk(0, j) = rng.normal();
    }
    auto dot_at = [&](int mm, int nn) {
        RowMat<double> q1 = qq, k1 = kk;
        apply_rotary(q1, mm);
        apply_rotary(k1, nn);
        return (q1 * k1.transpose())(0, 0);
    };
    for (int m = 0; m < 5; ++m)
        for (int n = 0; n <= m; ++n) CHECK(std::abs(dot_at(m, n) - dot_at(m + 3, n + 3)) < 1e-9);

    RowMat<double> odd(1, 7);
    odd.setZero();
    CHECK_THROWS_AS(apply_rotary(odd, 0), std::runtime_error);
}

namespace {

// Straight port of the published bucketing formula, kept separate from the
// implementation under test.
int reference_bucket(int query_pos, int key_pos, int num_buckets, int max_distance) {
    int relative_position = key_pos - query_pos;
    int n = -std::min(relative_position, 0); // causal variant
    int max_exact = num_buckets / 2;
    bool is_small = n < max_exact;
    int large = max_exact + (int)(std::log((float)n / max_exact) / std::log((float)max_distance / max_exact) *
                                  (num_buckets - max_exact));
    large = std::min(large, num_buckets - 1);
    return is_small ? n : large;
}

} // namespace

TEST_CASE("relative position buckets match the reference formula") {
    CHECK(relative_bias_bucket(0) == 0);
    CHECK(relative_bias_bucket(5) == 0); // at-or-after-query collapses to zero

    // All saturating distances share a single bucket.
    std::set<int> saturated;
    for (int d = 128; d <= 400; ++d) saturated.insert(relative_bias_bucket(-d));
    CHECK(saturated.size() == 1);
    CHECK(*saturated.begin() == 31);

    int prev = -1;
    for (int d = 0; d <= 200; ++d) {
        int b = relative_bias_bucket(-d);
        CHECK(b == reference_bucket(d, 0, 32, 128));
        CHECK(b >= prev); // monotone in |distance|
        prev = b;
    }
}

TEST_CASE("cross entropy loss") {
    // Uniform logits over 15 symbols.
    RowMat<float> logits = RowMat<float>::Zero(4, 15);
    std::vector<int> targets = {1, 2, 3, 4};
    std::vector<uint8_t> mask = {1, 1, 1, 1};
    CHECK(cross_entropy_loss<float>(logits, targets, mask) == doctest::Approx(std::log(15.0)).epsilon(1e-6));

    // Confident correct logits drive the loss to zero.
    RowMat<float> hot = RowMat<float>::Zero(2, 15);
    hot(0, 1) = 50.0f;
    hot(1, 2) = 50.0f;
    std::vector<int> t2 = {1, 2};
    std::vector<uint8_t> m2 = {1, 1};
    CHECK(cross_entropy_loss<float>(hot, t2, m2) < 1e-6f);

    // Two-position hand computation.
    RowMat<double> h(2, 3);
    h << 1.0, 2.0, 0.5,
         0.0, 0.0, 1.0;
    std::vector<int> t3 = {1, 0};
    std::vector<uint8_t> m3 = {1, 1};
    double lse0 = std::log(std::exp(1.0) + std::exp(2.0) + std::exp(0.5));
    double lse1 = std::log(2.0 + std::exp(1.0));
    double expect = ((lse0 - 2.0) + (lse1 - 0.0)) / 2.0;
    CHECK(cross_entropy_loss<double>(h, t3, m3) == doctest::Approx(expect).epsilon(1e-12));

    // Masked positions do not contribute.
    std::vector<uint8_t> m4 = {1, 0};
    CHECK(cross_entropy_loss<double>(h, t3, m4) == doctest::Approx(lse0 - 2.0).epsilon(1e-12));

    std::vector<uint8_t> empty = {0, 0};
    CHECK_THROWS_AS(cross_entropy_loss<double>(h, t3, empty), std::runtime_error);

    // dlogits rows sum to zero for masked-in positions.
    RowMat<double> dl;
    cross_entropy_loss<double>(h, t3, m3, &dl);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(dl.row(i).sum()) < 1e-12);
}

namespace {

double gradcheck_worst_rel(ModelConfig cfg, bool train_mode, uint64_t drop_seed) {
    Rng rng(31);
    auto p = init_parameters<double>(cfg, rng);
    std::vector<int> ids = {3, 1, 4, 1, 5, 9, 2, 6};
    const int B = 1, L = 8;
    std::vector<int> targets(size_t(L), 0);
    std::vector<uint8_t> mask(size_t(L), 1);
    for (int t = 0; t + 1 < L; ++t) targets[size_t(t)] = ids[size_t(t) + 1];
    mask[size_t(L) - 1] = 0;

    auto loss_of = [&](const ParametersT<double>& params) {
        auto logits = forward_logits<double>(params, cfg, ids, B, L, train_mode, drop_seed);
        return cross_entropy_loss<double>(logits, targets, mask);
    };

    ForwardCache<double> cache;
    auto logits = forward_logits<double>(p, cfg, ids, B, L, train_mode, drop_seed, &cache);
    RowMat<double> dlogits;
    cross_entropy_loss<double>(logits, targets, mask, &dlogits);
    auto grads = ParametersT<double>::zeros_like(p);
    backward_logits<double>(p, cfg, cache, dlogits, grads);

    const double eps = 1e-5;
    double worst = 0;
    std::vector<RowMat<double>*> tensors, gtensors;
    p.for_each([&tensors](const std::string&, RowMat<double>& m) { tensors.push_back(&m); });
    grads.for_each([&gtensors](const std::string&, RowMat<double>& m) { gtensors.push_back(&m); });
    Rng pick(77);
    for (size_t ti = 0; ti < tensors.size(); ++ti) {
        RowMat<double>& m = *tensors[ti];
        // Cover small tensors fully, sample entries of the bigger ones.
        int checks = int(std::min<int64_t>(m.size(), 40));
        for (int c = 0; c < checks; ++c) {
            int64_t flat = (m.size() <= 40) ? c : int64_t(pick.uniform(uint64_t(m.size())));
            int i = int(flat / m.cols()), j = int(flat % m.cols());
            double keep = m(i, j);
            m(i, j) = keep + eps;
            double up = loss_of(p);
            m(i, j) = keep - eps;
            double down = loss_of(p);
            m(i, j) = keep;
            double numeric = (up - down) / (2 * eps);
            double analytic = (*gtensors[ti])(i, j);
            double rel = std::abs(numeric - analytic) / std::max(1e-6, std::abs(numeric) + std::abs(analytic));
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

} // namespace

TEST_CASE("64-bit gradient check across positional schemes") {
    for (PosScheme pos : {PosScheme::Absolute, PosScheme::Rotary, PosScheme::RelativeBias}) {
        CAPTURE(pos_scheme_name(pos));
        CHECK(gradcheck_worst_rel(tiny_cfg(pos), false, 0) < 1e-4);
    }
}

TEST_CASE("64-bit gradient check with dropout masks held fixed") {
    ModelConfig cfg = tiny_cfg();
    cfg.dropout = 0.2f;
    CHECK(gradcheck_worst_rel(cfg, true, 12345) < 1e-4);
}
