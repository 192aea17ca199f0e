#pragma once

#include <string>
#include <vector>

#include "arithdyn/model.hpp"
#include "arithdyn/rng.hpp"
#include "arithdyn/task.hpp"
#include "arithdyn/vocab.hpp"

namespace arithdyn {

// Autoregressive continuation of one prompt: samples from softmax(logits/T)
// for temperature > 0, argmax for temperature == 0; stops at '$', PAD or
// max_new tokens. Returns only the newly generated tokens.
TokenSeq generate(const Parameters& p, const ModelConfig& cfg, const Vocab& v,
                  const TokenSeq& prompt, double temperature, Rng& rng, int max_new);

// Decodes many prompts in lock-step batches (no KV cache; each step re-runs
// the forward pass). Item n draws from stream (seed, n), so results do not
// depend on batching or thread count.
std::vector<std::string> generate_batch(const Parameters& p, const ModelConfig& cfg, const Vocab& v,
                                        const std::vector<TokenSeq>& prompts, double temperature,
                                        uint64_t seed, int max_new, int threads = 1);

// Structured reading of a model completion. Failures are data, not errors.
struct ParsedAnswer {
    bool ok = false;
    std::string raw;          // completion text without the terminator
    std::string plain_digits; // answer digits in plain order (addition/mult)
    long long value = 0;      // when plain_digits parses as an integer
    char relation = 0;        // comparison
    std::vector<std::string> fields; // sorting: split on ','
};

// Undoes the task's output format. For addition/multiplication the rightmost
// `width` characters are kept before inverting the digit order; width < 0
// uses the spec's fixed answer width.
ParsedAnswer parse_answer(const std::string& completion, const TaskSpec& spec, int width = -1);

} // namespace arithdyn
