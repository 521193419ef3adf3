#include "countrl/answer_format.hpp"

#include <stdexcept>

#include "countrl/errors.hpp"

namespace countrl {

Vocabulary::Vocabulary() {
    symbols_.reserve(kVocabSize);
    for (int d = 0; d <= 9; ++d) symbols_.push_back(std::string(1, char('0' + d)));
    symbols_.push_back("<ans>");
    symbols_.push_back("</ans>");
    symbols_.push_back("<eos>");
}

const Vocabulary& Vocabulary::instance() {
    static const Vocabulary vocab;
    return vocab;
}

const std::string& Vocabulary::symbol(int id) const {
    if (!is_valid_token(id)) throw ConfigError("token id out of range: " + std::to_string(id));
    return symbols_[static_cast<size_t>(id)];
}

std::optional<int> Vocabulary::id(const std::string& symbol) const {
    for (int i = 0; i < kVocabSize; ++i) {
        if (symbols_[static_cast<size_t>(i)] == symbol) return i;
    }
    return std::nullopt;
}

std::string Vocabulary::render(const TokenSeq& seq) const {
    std::string out;
    for (int tok : seq) out += symbol(tok);
    return out;
}

bool is_compliant(const TokenSeq& seq, const FormatGrammar& grammar) {
    // ANS_OPEN digit+ ANS_CLOSE EOS, nothing before or after.
    const size_t n = seq.size();
    if (n < 4 || n > static_cast<size_t>(grammar.max_len)) return false;
    if (seq.front() != kAnsOpen) return false;
    if (seq[n - 2] != kAnsClose || seq[n - 1] != kEos) return false;
    for (size_t i = 1; i + 2 < n; ++i) {
        if (!is_digit_token(seq[i])) return false;
    }
    return true;
}

namespace {

long decode_run(const TokenSeq& seq, size_t begin, size_t end) {
    long value = 0;
    size_t used = 0;
    for (size_t i = begin; i < end && used < kMaxExtractDigits; ++i, ++used) {
        value = value * 10 + seq[i];
    }
    return value;
}

}  // namespace

std::optional<long> extract_count(const TokenSeq& seq) {
    if (is_compliant(seq)) {
        return decode_run(seq, 1, seq.size() - 2);
    }
    // Lenient fallback: first maximal digit run anywhere in the sequence.
    for (size_t i = 0; i < seq.size(); ++i) {
        if (!is_digit_token(seq[i])) continue;
        size_t j = i;
        while (j < seq.size() && is_digit_token(seq[j])) ++j;
        return decode_run(seq, i, j);
    }
    return std::nullopt;
}

TokenSeq encode_count(long n, const FormatGrammar& grammar) {
    if (n < 0) throw ConfigError("encode_count: negative count");
    std::string digits = std::to_string(n);
    if (static_cast<int>(digits.size()) > grammar.max_len - 3) {
        throw ConfigError("encode_count: " + digits + " exceeds the grammar digit budget");
    }
    TokenSeq seq;
    seq.reserve(digits.size() + 3);
    seq.push_back(kAnsOpen);
    for (char c : digits) seq.push_back(c - '0');
    seq.push_back(kAnsClose);
    seq.push_back(kEos);
    return seq;
}

}  // namespace countrl
