#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "arithdyn/task.hpp"

namespace arithdyn {

// Character-level vocabulary. Symbols are single Unicode codepoints stored as
// UTF-8 strings; PAD is a sentinel that never appears in rendered text.
struct Vocab {
    std::vector<std::string> symbols; // index = token id; last entry is PAD
    std::unordered_map<std::string, int> id_of;
    int pad_id = -1;
    int terminator_id = -1; // '$'

    int size() const { return int(symbols.size()); }
    bool has(const std::string& sym) const { return id_of.count(sym) != 0; }
    int id(const std::string& sym) const;
    const std::string& symbol(int id) const;
    bool is_digit(int id) const { return id >= 0 && id < 10; }
    // Digits are laid out first so token id == digit value.
    int digit_id(int d) const { return d; }
};

struct TokenSeq {
    std::vector<int> ids;
    // Index of the first token after the task delimiter ('=' or '→');
    // -1 when the sequence has no delimiter (flagged undefined).
    int answer_start = -1;

    size_t size() const { return ids.size(); }
};

Vocab build_vocab(Task task);

TokenSeq encode(const std::string& text, const Vocab& v);
std::string decode_tokens(const TokenSeq& t, const Vocab& v);
TokenSeq pad_sequence(const TokenSeq& t, int max_len, const Vocab& v);

// Splits UTF-8 text into codepoints (the tokenizer's unit).
std::vector<std::string> utf8_codepoints(const std::string& text);

} // namespace arithdyn
