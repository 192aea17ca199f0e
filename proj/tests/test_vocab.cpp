#include <doctest.h>

#include "arithdyn/datagen.hpp"
#include "arithdyn/rng.hpp"
#include "arithdyn/vocab.hpp"
#include <stdexcept>

using namespace arithdyn;

TEST_CASE("vocab sizes per task") {
    CHECK(build_vocab(Task::Addition).size() == 15);
    CHECK(build_vocab(Task::Multiplication).size() == 15);
    CHECK(build_vocab(Task::Comparison).size() == 18);
    CHECK(build_vocab(Task::Sorting).size() == 15);
    CHECK(build_vocab(Task::AdditionScratchpad).size() == 17);
}

TEST_CASE("vocab ids are a gap-free bijection with digits first") {
    for (Task t : {Task::Addition, Task::Multiplication, Task::Comparison, Task::Sorting}) {
        Vocab v = build_vocab(t);
        for (int i = 0; i < v.size(); ++i) CHECK(v.id(v.symbol(i)) == i);
        for (int d = 0; d < 10; ++d) CHECK(v.symbol(d) == std::string(1, char('0' + d)));
        CHECK(v.pad_id == v.size() - 1);
        CHECK(v.symbol(v.terminator_id) == "$");
    }
}

TEST_CASE("encode basics") {
    Vocab v = build_vocab(Task::Addition);
    TokenSeq t = encode("1+2=3$", v);
    CHECK(t.ids.size() == 6);
    CHECK(t.answer_start == 4);

    TokenSeq empty = encode("", v);
    CHECK(empty.ids.empty());
    CHECK(empty.answer_start == -1);

    TokenSeq full = encode("349+102+382+907=1740$", v);
    CHECK(full.ids.size() == 21); // the 4-operand worst case fills max seq len

    CHECK_THROWS_WITH_AS(encode("1a2", v), doctest::Contains("'a'"), std::runtime_error);
    CHECK_THROWS_WITH_AS(encode("12x", v), doctest::Contains("offset 2"), std::runtime_error);
}

TEST_CASE("comparison delimiter is the arrow, answer_start after it") {
    Vocab v = build_vocab(Task::Comparison);
    TokenSeq t = encode("5293,5241→>$", v);
    CHECK(t.ids.size() == 12); // matches the task's max seq len
    CHECK(t.answer_start == 10);
    CHECK(decode_tokens(t, v) == "5293,5241→>$");
}

TEST_CASE("decode inverts encode on PAD-free strings") {
    Vocab v = build_vocab(Task::Comparison);
    CHECK(decode_tokens(encode("12<34", v), v) == "12<34");
    TokenSeq pads;
    pads.ids.assign(7, v.pad_id);
    CHECK(decode_tokens(pads, v).empty());
    CHECK(decode_tokens(encode("0471$", v), v) == "0471$");
    TokenSeq bad;
    bad.ids = {999};
    CHECK_THROWS_AS(decode_tokens(bad, v), std::runtime_error);
}

TEST_CASE("encode/decode round trip property over random vocab strings") {
    Vocab v = build_vocab(Task::Sorting);
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        std::string s;
        int len = int(rng.uniform(30));
        for (int i = 0; i < len; ++i) s += v.symbol(int(rng.uniform(uint64_t(v.size() - 1)))); // skip PAD
        CHECK(decode_tokens(encode(s, v), v) == s);
    }
}

TEST_CASE("pad_sequence") {
    Vocab v = build_vocab(Task::Addition);
    TokenSeq t = encode("1+2=3$", v);
    TokenSeq p = pad_sequence(t, 21, v);
    CHECK(p.ids.size() == 21);
    for (size_t i = 6; i < 21; ++i) CHECK(p.ids[i] == v.pad_id);
    CHECK(pad_sequence(p, 21, v).ids == p.ids);
    TokenSeq too_long;
    too_long.ids.assign(22, 0);
    CHECK_THROWS_AS(pad_sequence(too_long, 21, v), std::runtime_error);
}

TEST_CASE("extremal rendered examples fit the published max sequence lengths") {
    TaskSpec add;
    add.task = Task::Addition;
    CHECK(add.max_seq_len() == 21);

    TaskSpec mult;
    mult.task = Task::Multiplication;
    mult.length_max = 40;
    CHECK(mult.max_seq_len() == 85);

    TaskSpec cmp;
    cmp.task = Task::Comparison;
    CHECK(cmp.max_seq_len() == 12);

    TaskSpec sort;
    sort.task = Task::Sorting;
    CHECK(sort.max_seq_len() == 40);
}
