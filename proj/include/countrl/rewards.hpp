#pragma once

#include <optional>

#include "countrl/answer_format.hpp"

namespace countrl {

// Components of one scored rollout. The precision reward lives in
// {0} u (1, 1.5]: accuracy outranks formatting, so an in-band count is
// always worth more than a well-formed miss.
struct RewardBreakdown {
    double r_f = 0.0;   // format reward, 0 or 1
    double r_p = 0.0;   // precision reward, 0 or in (1, 1.5]
    double mu_f = 1.0;  // membership degree on the format component
    double mu_p = 1.0;  // membership degree on the precision component
    double total = 0.0; // mu_f * r_f + mu_p * r_p
};

// 1 when the predicted count lands within 50% relative error of the truth.
double binary_accuracy_reward(std::optional<long> pred, long truth);

// 1.5 - |pred - truth| / truth inside the 50% band, 0 outside or when the
// prediction is absent.
double precision_reward(std::optional<long> pred, long truth);

// 1 iff the sequence matches the answer grammar.
double format_reward(const TokenSeq& seq, const FormatGrammar& grammar = {});

// Full fuzzy scoring of a rollout: format compliance, count extraction,
// graded precision, membership-weighted sum.
RewardBreakdown fgrpr_reward(const TokenSeq& seq, long truth, double mu_f = 1.0,
                             double mu_p = 1.0, const FormatGrammar& grammar = {});

// Training total under the plain binary regime: format reward plus the 0/1
// accuracy reward, with the same membership weighting. All regimes share the
// format reward function.
double binary_grpo_reward(const TokenSeq& seq, long truth, double mu_f = 1.0, double mu_p = 1.0,
                          const FormatGrammar& grammar = {});

}  // namespace countrl
