#include "countrl/rewards.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "countrl/errors.hpp"

namespace countrl {

namespace {

void check_truth(long truth) {
    if (truth < 1) throw std::domain_error("reward: truth must be >= 1, got " + std::to_string(truth));
}

void check_membership(double mu, const char* name) {
    if (!(mu >= 0.0 && mu <= 1.0))
        throw std::domain_error(std::string("reward: ") + name + " must lie in [0, 1]");
}

double relative_error(long pred, long truth) {
    return std::abs(static_cast<double>(pred) - static_cast<double>(truth)) /
           static_cast<double>(truth);
}

}  // namespace

double binary_accuracy_reward(std::optional<long> pred, long truth) {
    check_truth(truth);
    if (!pred) return 0.0;
    return relative_error(*pred, truth) < 0.5 ? 1.0 : 0.0;
}

double precision_reward(std::optional<long> pred, long truth) {
    check_truth(truth);
    if (!pred) return 0.0;
    const double rel = relative_error(*pred, truth);
    return rel < 0.5 ? 1.5 - rel : 0.0;
}

double format_reward(const TokenSeq& seq, const FormatGrammar& grammar) {
    return is_compliant(seq, grammar) ? 1.0 : 0.0;
}

RewardBreakdown fgrpr_reward(const TokenSeq& seq, long truth, double mu_f, double mu_p,
                             const FormatGrammar& grammar) {
    check_truth(truth);
    check_membership(mu_f, "mu_f");
    check_membership(mu_p, "mu_p");
    RewardBreakdown out;
    out.mu_f = mu_f;
    out.mu_p = mu_p;
    out.r_f = format_reward(seq, grammar);
    out.r_p = precision_reward(extract_count(seq), truth);
    out.total = mu_f * out.r_f + mu_p * out.r_p;
    return out;
}

double binary_grpo_reward(const TokenSeq& seq, long truth, double mu_f, double mu_p,
                          const FormatGrammar& grammar) {
    check_truth(truth);
    check_membership(mu_f, "mu_f");
    check_membership(mu_p, "mu_p");
    return mu_f * format_reward(seq, grammar) +
           mu_p * binary_accuracy_reward(extract_count(seq), truth);
}

}  // namespace countrl
