#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace arithdyn {

enum class Task {
    Addition,
    Multiplication,
    Comparison,
    Sorting,
    AdditionScratchpad,
};

std::string task_name(Task t);
Task task_from_name(const std::string& name);

enum class Sampling {
    Uniform,
    NcidBalanced,   // comparison: 5 equiprobable prefix groups k=0..4
    DoublyBalanced, // sorting: 3/4-digit lengths 50/50, NCID k=0..2
    ClosenessOnly,  // sorting: all 4-digit, NCID k=0..2
};

std::string sampling_name(Sampling s);
Sampling sampling_from_name(const std::string& name);

enum class ScratchpadKind { None, D, DA };

// Output digit order for rendered answers.
struct OutputFormat {
    enum Kind { Plain, Reverse, Permutation } kind = Plain;
    // sigma[j] = plain-order digit index written at output position j (0-based).
    std::vector<int> sigma;

    static OutputFormat plain() { return {Plain, {}}; }
    static OutputFormat reverse() { return {Reverse, {}}; }
    static OutputFormat permutation(std::vector<int> s) { return {Permutation, std::move(s)}; }
    bool is_plain() const { return kind == Plain; }
    std::string name() const;
    static OutputFormat from_name(const std::string& name);
};

// Declarative description of a dataset: the single source of truth for
// generation, tokenization and evaluation.
struct TaskSpec {
    Task task = Task::Addition;
    int operand_count = 4;
    long long operand_min = 0;
    long long operand_max = 999; // addition; comparison/sorting use digit-wise sampling
    int length_min = 1;          // multiplication: digits of a
    int length_max = 40;
    OutputFormat format;
    Sampling sampling = Sampling::Uniform;
    long long sample_size = 0;
    uint64_t seed = 0;
    ScratchpadKind scratchpad = ScratchpadKind::None;
    // Answer-digit ablation: place counted from the right (0 = units); -1 = off.
    int ablate_place = -1;
    std::vector<int> ablate_digits; // replacement support, subset of 0..9
    // Multiplication only: weight lengths like the alternative balanced mix
    // instead of uniform lengths.
    bool length_balanced_mult = false;

    // Widest rendered example for this spec, in tokens.
    int max_seq_len() const;
    // Fixed answer width used by reverse/permuted addition rendering.
    int answer_width() const;
};

struct ExampleMeta {
    int ncid = -1;                  // comparison/sorting group k
    std::vector<int> lengths;       // digit lengths of the operands
    std::string suite;              // test-suite tag (contrast-1, conflicting, ...)
    int contrast_k = 0;             // contrast pairs: differing digit index (1-based)
    int ablated_place = -1;         // answer place replaced by noise, -1 = none
};

// One rendered training/test instance. The structured fields are the ground
// truth the renderer worked from; metrics re-derive expectations from them.
struct Example {
    std::string text;
    std::vector<long long> operands;
    // Multiplication keeps digit strings too: `a` may exceed 64 bits.
    std::vector<std::string> operand_text;
    long long answer_value = 0;          // addition/multiplication
    char relation = 0;                   // comparison: '>', '<', '='
    std::vector<long long> answer_sorted; // sorting
    ExampleMeta meta;

    // Rendered answer region (between the delimiter and '$').
    std::string answer_text() const;
    // Prompt region including the delimiter.
    std::string prompt_text() const;
};

} // namespace arithdyn
