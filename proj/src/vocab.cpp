#include "arithdyn/vocab.hpp"

#include <stdexcept>

namespace arithdyn {

int Vocab::id(const std::string& sym) const {
    auto it = id_of.find(sym);
    if (it == id_of.end()) throw std::runtime_error("vocab: unknown symbol '" + sym + "'");
    return it->second;
}

const std::string& Vocab::symbol(int id) const {
    if (id < 0 || id >= size()) throw std::runtime_error("vocab: invalid token id " + std::to_string(id));
    return symbols[size_t(id)];
}

static Vocab make_vocab(const std::vector<std::string>& extra) {
    Vocab v;
    for (int d = 0; d < 10; ++d) v.symbols.push_back(std::string(1, char('0' + d)));
    for (const auto& s : extra) v.symbols.push_back(s);
    v.symbols.push_back("$");
    v.symbols.push_back("\n");
    v.symbols.push_back("PAD");
    for (int i = 0; i < int(v.symbols.size()); ++i) v.id_of[v.symbols[size_t(i)]] = i;
    v.pad_id = v.id("PAD");
    v.terminator_id = v.id("$");
    return v;
}

Vocab build_vocab(Task task) {
    switch (task) {
    case Task::Addition:            return make_vocab({"+", "="});
    case Task::AdditionScratchpad:  return make_vocab({"+", "=", "(", ")"});
    case Task::Multiplication:      return make_vocab({"×", "="});            // ×
    case Task::Comparison:          return make_vocab({",", "→", ">", "<", "="}); // →
    case Task::Sorting:             return make_vocab({",", "→"});
    }
    throw std::runtime_error("build_vocab: unknown task");
}

std::vector<std::string> utf8_codepoints(const std::string& text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        unsigned char c = (unsigned char)text[i];
        size_t n = 1;
        if ((c & 0x80) == 0x00) n = 1;
        else if ((c & 0xe0) == 0xc0) n = 2;
        else if ((c & 0xf0) == 0xe0) n = 3;
        else if ((c & 0xf8) == 0xf0) n = 4;
        else throw std::runtime_error("utf8: bad leading byte at offset " + std::to_string(i));
        if (i + n > text.size()) throw std::runtime_error("utf8: truncated sequence at offset " + std::to_string(i));
        out.push_back(text.substr(i, n));
        i += n;
    }
    return out;
}

TokenSeq encode(const std::string& text, const Vocab& v) {
    TokenSeq t;
    auto cps = utf8_codepoints(text);
    t.ids.reserve(cps.size());
    int delim_eq = v.has("=") ? v.id("=") : -1;
    int delim_arrow = v.has("→") ? v.id("→") : -1;
    // Comparison uses '=' as a relation token, so the arrow wins as delimiter
    // when both exist in the vocabulary.
    int delim = delim_arrow >= 0 ? delim_arrow : delim_eq;
    for (size_t i = 0; i < cps.size(); ++i) {
        auto it = v.id_of.find(cps[i]);
        if (it == v.id_of.end() || it->second == v.pad_id)
            throw std::runtime_error("encode: unknown character '" + cps[i] + "' at offset " + std::to_string(i));
        t.ids.push_back(it->second);
        if (t.answer_start < 0 && it->second == delim) t.answer_start = int(i) + 1;
    }
    return t;
}

std::string decode_tokens(const TokenSeq& t, const Vocab& v) {
    std::string out;
    for (int id : t.ids) {
        const std::string& s = v.symbol(id);
        if (id == v.pad_id) continue;
        out += s;
    }
    return out;
}

TokenSeq pad_sequence(const TokenSeq& t, int max_len, const Vocab& v) {
    if (int(t.ids.size()) > max_len)
        throw std::runtime_error("pad_sequence: length " + std::to_string(t.ids.size()) +
                                 " exceeds max " + std::to_string(max_len));
    TokenSeq out = t;
    out.ids.resize(size_t(max_len), v.pad_id);
    return out;
}

} // namespace arithdyn
