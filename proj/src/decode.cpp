#include "arithdyn/decode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace arithdyn {

namespace {

int sample_from_logits(const float* logits, int n, double temperature, Rng& rng) {
    if (temperature == 0.0) {
        int best = 0;
        for (int j = 1; j < n; ++j)
            if (logits[j] > logits[best]) best = j;
        return best;
    }
    double mx = logits[0];
    for (int j = 1; j < n; ++j) mx = std::max(mx, double(logits[j]));
    auto probs = std::vector<double>(size_t(n));
    double sum = 0;
    for (int j = 0; j < n; ++j) sum += probs[size_t(j)] = std::exp((double(logits[j]) - mx) / temperature);
    double u = rng.uniform01() * sum;
    double acc = 0;
    for (int j = 0; j < n; ++j) {
        acc += probs[size_t(j)];
        if (u < acc) return j;
    }
    return n - 1;
}

} // namespace

TokenSeq generate(const Parameters& p, const ModelConfig& cfg, const Vocab& v,
                  const TokenSeq& prompt, double temperature, Rng& rng, int max_new) {
    if (temperature < 0) throw std::runtime_error("generate: temperature must be >= 0");
    std::vector<int> ids = prompt.ids;
    TokenSeq out;
    for (int k = 0; k < max_new; ++k) {
        if (int(ids.size()) >= cfg.max_seq_len) break;
        RowMat<float> logits = forward_logits<float>(p, cfg, ids, 1, int(ids.size()), false, 0);
        int next = sample_from_logits(logits.row(logits.rows() - 1).data(), cfg.vocab_size, temperature, rng);
        if (next == v.terminator_id || next == v.pad_id) break;
        ids.push_back(next);
        out.ids.push_back(next);
    }
    return out;
}

std::vector<std::string> generate_batch(const Parameters& p, const ModelConfig& cfg, const Vocab& v,
                                        const std::vector<TokenSeq>& prompts, double temperature,
                                        uint64_t seed, int max_new, int threads) {
    const int n = int(prompts.size());
    auto out = std::vector<std::string>(size_t(n));
    if (n == 0) return out;
    threads = std::max(1, std::min(threads, n));

    auto worker = [&](int lo, int hi) {
        // One lock-step block: grow all sequences together, re-padding to the
        // current longest, until every item stopped.
        const int count = hi - lo;
        auto seqs = std::vector<std::vector<int>>(size_t(count));
        std::vector<Rng> rngs;
        std::vector<bool> done(size_t(count), false);
        std::vector<int> new_tokens(size_t(count), 0);
        int longest = 0;
        for (int i = 0; i < count; ++i) {
            seqs[size_t(i)] = prompts[size_t(lo + i)].ids;
            longest = std::max(longest, int(seqs[size_t(i)].size()));
            rngs.push_back(Rng::stream(seed, uint64_t(lo + i)));
        }
        while (true) {
            bool all_done = true;
            for (int i = 0; i < count; ++i)
                all_done = all_done && (done[size_t(i)] || new_tokens[size_t(i)] >= max_new ||
                                        int(seqs[size_t(i)].size()) >= cfg.max_seq_len);
            if (all_done) break;
            int L = 0;
            for (int i = 0; i < count; ++i) L = std::max(L, int(seqs[size_t(i)].size()));
            std::vector<int> ids(size_t(count) * L, v.pad_id);
            for (int i = 0; i < count; ++i)
                std::copy(seqs[size_t(i)].begin(), seqs[size_t(i)].end(), ids.begin() + size_t(i) * L);
            RowMat<float> logits = forward_logits<float>(p, cfg, ids, count, L, false, 0);
            for (int i = 0; i < count; ++i) {
                if (done[size_t(i)] || new_tokens[size_t(i)] >= max_new ||
                    int(seqs[size_t(i)].size()) >= cfg.max_seq_len)
                    continue;
                int last = int(seqs[size_t(i)].size()) - 1;
                int next = sample_from_logits(logits.row(Eigen::Index(i) * L + last).data(), cfg.vocab_size,
                                              temperature, rngs[size_t(i)]);
                if (next == v.terminator_id || next == v.pad_id) {
                    done[size_t(i)] = true;
                } else {
                    seqs[size_t(i)].push_back(next);
                    new_tokens[size_t(i)] += 1;
                }
            }
        }
        for (int i = 0; i < count; ++i) {
            TokenSeq t;
            t.ids.assign(seqs[size_t(i)].begin() + long(prompts[size_t(lo + i)].ids.size()), seqs[size_t(i)].end());
            out[size_t(lo + i)] = decode_tokens(t, v);
        }
    };

    if (threads == 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) {
            int lo = w * n / threads, hi = (w + 1) * n / threads;
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& t : pool) t.join();
    }
    return out;
}

ParsedAnswer parse_answer(const std::string& completion, const TaskSpec& spec, int width) {
    ParsedAnswer a;
    a.raw = completion;
    while (!a.raw.empty() && (a.raw.back() == '$' || a.raw.back() == '\n')) a.raw.pop_back();

    switch (spec.task) {
    case Task::Addition:
    case Task::AdditionScratchpad:
    case Task::Multiplication: {
        std::string s = a.raw;
        if (spec.task == Task::AdditionScratchpad) {
            size_t eq = s.rfind('=');
            if (eq != std::string::npos) s = s.substr(eq + 1);
        }
        int w = width >= 0 ? width : spec.answer_width();
        if (int(s.size()) > w) s = s.substr(s.size() - size_t(w));
        switch (spec.format.kind) {
        case OutputFormat::Plain:
            break;
        case OutputFormat::Reverse:
            std::reverse(s.begin(), s.end());
            break;
        case OutputFormat::Permutation: {
            // Position j holds plain digit sigma[j]; invert that placement.
            std::string plain(s.size(), '?');
            if (s.size() != spec.format.sigma.size()) {
                a.plain_digits = s;
                a.ok = false;
                return a;
            }
            for (size_t j = 0; j < s.size(); ++j) plain[size_t(spec.format.sigma[j])] = s[j];
            s = plain;
            break;
        }
        }
        a.plain_digits = s;
        a.ok = !s.empty() && s.find_first_not_of("0123456789") == std::string::npos &&
               s.size() <= 18;
        if (a.ok) a.value = std::stoll(s);
        return a;
    }
    case Task::Comparison: {
        auto cps = utf8_codepoints(a.raw);
        if (cps.size() == 1 && (cps[0] == ">" || cps[0] == "<" || cps[0] == "=")) {
            a.ok = true;
            a.relation = cps[0][0];
        }
        return a;
    }
    case Task::Sorting: {
        std::string field;
        bool valid = !a.raw.empty();
        for (size_t i = 0; i <= a.raw.size(); ++i) {
            if (i == a.raw.size() || a.raw[i] == ',') {
                a.fields.push_back(field);
                if (field.empty() || field.find_first_not_of("0123456789") != std::string::npos)
                    valid = false;
                field.clear();
            } else {
                field += a.raw[i];
            }
        }
        a.ok = valid;
        return a;
    }
    }
    return a;
}

} // namespace arithdyn
