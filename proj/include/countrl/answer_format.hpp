#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace countrl {

// Answer vocabulary: ten digit tokens whose id equals their value, the answer
// delimiters, and the end-of-sequence token. 13 symbols total.
constexpr int kAnsOpen = 10;
constexpr int kAnsClose = 11;
constexpr int kEos = 12;
constexpr int kVocabSize = 13;

// The BOS embedding shares the EOS row; EOS never occurs as a generated
// prefix token, so the row is free at position 0.
constexpr int kBos = kEos;

using TokenSeq = std::vector<int>;

inline bool is_digit_token(int id) { return id >= 0 && id <= 9; }
inline bool is_valid_token(int id) { return id >= 0 && id < kVocabSize; }

// Stable id <-> symbol bijection, used for rendering and log inspection.
class Vocabulary {
public:
    static const Vocabulary& instance();

    const std::string& symbol(int id) const;
    std::optional<int> id(const std::string& symbol) const;
    std::string render(const TokenSeq& seq) const;

private:
    Vocabulary();
    std::vector<std::string> symbols_;
};

// The answer grammar: ANS_OPEN digit+ ANS_CLOSE EOS, whole-sequence match,
// at most max_len tokens.
struct FormatGrammar {
    int max_len = 8;
};

// Extraction caps the digit run at 6 digits so decoded values stay below 1e6.
constexpr int kMaxExtractDigits = 6;

bool is_compliant(const TokenSeq& seq, const FormatGrammar& grammar = {});

// Compliant sequences decode their delimited digit run. Non-compliant
// sequences fall back to the first maximal digit run found anywhere; a
// sequence with no digit yields nullopt. Leading zeros are allowed.
std::optional<long> extract_count(const TokenSeq& seq);

// Canonical compliant encoding of n; requires 0 <= n and n to fit within
// the grammar's digit budget (max_len - 3 digits).
TokenSeq encode_count(long n, const FormatGrammar& grammar = {});

}  // namespace countrl
