#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>

#include "countrl/answer_format.hpp"
#include "countrl/dense.hpp"
#include "countrl/errors.hpp"

namespace countrl {

// A single-layer tanh recurrence conditioned on a fixed feature vector:
//
//   h_t     = tanh(w_in * x + w_rec * h_{t-1} + embed[prev_t] + b_hidden)
//   logits  = w_out * h_t + b_out
//
// with h_{-1} = 0 and prev_0 = BOS (the EOS embedding row). Small enough to
// differentiate exactly, yet every per-token probability ratio the group
// objective needs is well defined.
template <typename Scalar>
struct PolicyParamsT {
    MatrixX<Scalar> w_in;      // hidden x d
    MatrixX<Scalar> w_rec;     // hidden x hidden
    MatrixX<Scalar> embed;     // vocab x hidden
    MatrixX<Scalar> w_out;     // vocab x hidden
    VectorX<Scalar> b_hidden;  // hidden
    VectorX<Scalar> b_out;     // vocab

    int feature_dim() const { return static_cast<int>(w_in.cols()); }
    int hidden_dim() const { return static_cast<int>(w_in.rows()); }
    int vocab_size() const { return static_cast<int>(w_out.rows()); }

    bool shape_consistent() const {
        const int h = hidden_dim();
        return w_rec.rows() == h && w_rec.cols() == h && embed.rows() == kVocabSize &&
               embed.cols() == h && w_out.rows() == kVocabSize && w_out.cols() == h &&
               b_hidden.size() == h && b_out.size() == kVocabSize;
    }

    bool all_finite() const {
        return w_in.allFinite() && w_rec.allFinite() && embed.allFinite() &&
               w_out.allFinite() && b_hidden.allFinite() && b_out.allFinite();
    }

    void set_zero() {
        w_in.setZero();
        w_rec.setZero();
        embed.setZero();
        w_out.setZero();
        b_hidden.setZero();
        b_out.setZero();
    }

    // this += a * other, blockwise.
    void add_scaled(const PolicyParamsT& other, Scalar a) {
        w_in += a * other.w_in;
        w_rec += a * other.w_rec;
        embed += a * other.embed;
        w_out += a * other.w_out;
        b_hidden += a * other.b_hidden;
        b_out += a * other.b_out;
    }

    void scale(Scalar a) {
        w_in *= a;
        w_rec *= a;
        embed *= a;
        w_out *= a;
        b_hidden *= a;
        b_out *= a;
    }

    Scalar squared_norm() const {
        return w_in.squaredNorm() + w_rec.squaredNorm() + embed.squaredNorm() +
               w_out.squaredNorm() + b_hidden.squaredNorm() + b_out.squaredNorm();
    }
};

using PolicyParams = PolicyParamsT<double>;

template <typename Scalar>
PolicyParamsT<Scalar> zeros_like(const PolicyParamsT<Scalar>& p) {
    PolicyParamsT<Scalar> z = p;
    z.set_zero();
    return z;
}

// Fresh parameters, uniform in [-0.1, 0.1]. Near-uniform token distributions
// at the start give the format reward its early learning signal.
template <typename Scalar = double>
PolicyParamsT<Scalar> init_policy(int feature_dim, int hidden_dim, std::uint64_t seed) {
    if (feature_dim < 1 || hidden_dim < 1) throw ConfigError("init_policy: dims must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<Scalar> u(Scalar(-0.1), Scalar(0.1));
    auto fill = [&](auto& m) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng);
    };
    PolicyParamsT<Scalar> p;
    p.w_in.resize(hidden_dim, feature_dim);
    p.w_rec.resize(hidden_dim, hidden_dim);
    p.embed.resize(kVocabSize, hidden_dim);
    p.w_out.resize(kVocabSize, hidden_dim);
    p.b_hidden.resize(hidden_dim);
    p.b_out.resize(kVocabSize);
    fill(p.w_in);
    fill(p.w_rec);
    fill(p.embed);
    fill(p.w_out);
    fill(p.b_hidden);
    fill(p.b_out);
    return p;
}

// Deep copy, detached from the source. Frozen copies serve as the sampling
// policy and the KL reference.
template <typename Scalar>
PolicyParamsT<Scalar> snapshot(const PolicyParamsT<Scalar>& params) {
    return params;
}

// One sampled output: the token sequence plus everything the group objective
// reads back later. Distributions are stored one column per position.
template <typename Scalar>
struct RolloutT {
    VectorX<Scalar> features;
    TokenSeq tokens;
    VectorX<Scalar> logp_cur;   // log prob of tokens[t] under the sampling-time policy
    VectorX<Scalar> logp_old;   // frozen behavior policy; equal to logp_cur at creation
    MatrixX<Scalar> dist_cur;   // vocab x T
    MatrixX<Scalar> dist_ref;   // vocab x T
};

using Rollout = RolloutT<double>;

namespace detail {

template <typename Scalar>
void check_features(const PolicyParamsT<Scalar>& params, const VectorX<Scalar>& features) {
    if (!params.shape_consistent())
        throw ConfigError("policy parameters have inconsistent shapes");
    if (features.size() != params.feature_dim())
        throw ConfigError("feature vector has dimension " + std::to_string(features.size()) +
                          ", policy expects " + std::to_string(params.feature_dim()));
}

// Incremental recurrence state for generation.
template <typename Scalar>
struct StepState {
    VectorX<Scalar> h;
    int prev = kBos;
    bool started = false;
};

template <typename Scalar>
VectorX<Scalar> step(const PolicyParamsT<Scalar>& params, const VectorX<Scalar>& features,
                     StepState<Scalar>& state) {
    VectorX<Scalar> pre = params.w_in * features + params.embed.row(state.prev).transpose() +
                          params.b_hidden;
    if (state.started) pre.noalias() += params.w_rec * state.h;
    state.h = pre.array().tanh().matrix();
    state.started = true;
    return softmax(params.w_out * state.h + params.b_out);
}

// Teacher-forced pass over a whole token sequence.
template <typename Scalar>
struct ForwardCache {
    MatrixX<Scalar> hidden;  // hidden x T
    MatrixX<Scalar> probs;   // vocab x T
    VectorX<Scalar> logp;    // T
};

template <typename Scalar>
ForwardCache<Scalar> teacher_forced(const PolicyParamsT<Scalar>& params,
                                    const VectorX<Scalar>& features, const TokenSeq& tokens) {
    check_features(params, features);
    const int T = static_cast<int>(tokens.size());
    ForwardCache<Scalar> cache;
    cache.hidden.resize(params.hidden_dim(), T);
    cache.probs.resize(kVocabSize, T);
    cache.logp.resize(T);
    const VectorX<Scalar> drive = params.w_in * features + params.b_hidden;
    for (int t = 0; t < T; ++t) {
        const int prev = t == 0 ? kBos : tokens[static_cast<size_t>(t - 1)];
        if (!is_valid_token(tokens[static_cast<size_t>(t)]) || !is_valid_token(prev))
            throw ConfigError("token id out of vocabulary range");
        VectorX<Scalar> pre = drive + params.embed.row(prev).transpose();
        if (t > 0) pre.noalias() += params.w_rec * cache.hidden.col(t - 1);
        cache.hidden.col(t) = pre.array().tanh().matrix();
        VectorX<Scalar> logits = params.w_out * cache.hidden.col(t) + params.b_out;
        const Scalar lse = log_sum_exp(logits);
        if (!std::isfinite(lse))
            throw NumericalError("non-finite logits at position " + std::to_string(t));
        cache.probs.col(t) = (logits.array() - lse).exp().matrix();
        cache.logp(t) = logits(tokens[static_cast<size_t>(t)]) - lse;
    }
    return cache;
}

// Backpropagate arbitrary per-position logit gradients through the
// recurrence. dlogits is vocab x T; the result has the parameter shape.
template <typename Scalar>
PolicyParamsT<Scalar> grad_from_logits(const PolicyParamsT<Scalar>& params,
                                       const VectorX<Scalar>& features, const TokenSeq& tokens,
                                       const ForwardCache<Scalar>& cache,
                                       const MatrixX<Scalar>& dlogits) {
    PolicyParamsT<Scalar> grad = zeros_like(params);
    const int T = static_cast<int>(tokens.size());
    VectorX<Scalar> carry = VectorX<Scalar>::Zero(params.hidden_dim());
    for (int t = T - 1; t >= 0; --t) {
        grad.w_out.noalias() += dlogits.col(t) * cache.hidden.col(t).transpose();
        grad.b_out += dlogits.col(t);
        VectorX<Scalar> dh = params.w_out.transpose() * dlogits.col(t) + carry;
        VectorX<Scalar> dpre =
            (dh.array() * (Scalar(1) - cache.hidden.col(t).array().square())).matrix();
        grad.w_in.noalias() += dpre * features.transpose();
        grad.b_hidden += dpre;
        const int prev = t == 0 ? kBos : tokens[static_cast<size_t>(t - 1)];
        grad.embed.row(prev) += dpre.transpose();
        if (t > 0) grad.w_rec.noalias() += dpre * cache.hidden.col(t - 1).transpose();
        carry = params.w_rec.transpose() * dpre;
    }
    return grad;
}

}  // namespace detail

// Distribution over the next token after the given prefix.
template <typename Scalar>
VectorX<Scalar> forward_dist(const PolicyParamsT<Scalar>& params, const VectorX<Scalar>& features,
                             const TokenSeq& prefix) {
    detail::check_features(params, features);
    detail::StepState<Scalar> state;
    VectorX<Scalar> dist = detail::step(params, features, state);
    for (int tok : prefix) {
        if (!is_valid_token(tok)) throw ConfigError("prefix token out of vocabulary range");
        state.prev = tok;
        dist = detail::step(params, features, state);
    }
    return dist;
}

// Ancestral sampling at temperature 1 until EOS or max_len, recording the
// per-position distributions under both the sampling policy and the
// reference. Deterministic for a fixed seed.
template <typename Scalar>
RolloutT<Scalar> sample_rollout(const PolicyParamsT<Scalar>& params,
                                const PolicyParamsT<Scalar>& ref, const VectorX<Scalar>& features,
                                std::uint64_t seed, int max_len = FormatGrammar{}.max_len) {
    detail::check_features(params, features);
    detail::check_features(ref, features);
    if (max_len < 1) throw ConfigError("sample_rollout: max_len must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    RolloutT<Scalar> out;
    out.features = features;
    out.dist_cur.resize(kVocabSize, max_len);
    out.dist_ref.resize(kVocabSize, max_len);
    out.logp_cur.resize(max_len);

    detail::StepState<Scalar> cur_state;
    detail::StepState<Scalar> ref_state;
    int t = 0;
    while (t < max_len) {
        const VectorX<Scalar> p = detail::step(params, features, cur_state);
        const VectorX<Scalar> q = detail::step(ref, features, ref_state);
        const double u = unit(rng);
        double cdf = 0.0;
        int tok = kVocabSize - 1;
        for (int v = 0; v < kVocabSize; ++v) {
            cdf += static_cast<double>(p(v));
            if (u < cdf) {
                tok = v;
                break;
            }
        }
        out.dist_cur.col(t) = p;
        out.dist_ref.col(t) = q;
        out.logp_cur(t) = std::log(p(tok));
        out.tokens.push_back(tok);
        cur_state.prev = tok;
        ref_state.prev = tok;
        ++t;
        if (tok == kEos) break;
    }
    out.dist_cur.conservativeResize(Eigen::NoChange, t);
    out.dist_ref.conservativeResize(Eigen::NoChange, t);
    out.logp_cur.conservativeResize(t);
    out.logp_old = out.logp_cur;
    return out;
}

// Greedy decoding; ties break toward the lowest token id.
template <typename Scalar>
TokenSeq greedy_decode(const PolicyParamsT<Scalar>& params, const VectorX<Scalar>& features,
                       int max_len = FormatGrammar{}.max_len) {
    detail::check_features(params, features);
    detail::StepState<Scalar> state;
    TokenSeq tokens;
    for (int t = 0; t < max_len; ++t) {
        const VectorX<Scalar> p = detail::step(params, features, state);
        const int tok = argmax_lowest(p);
        tokens.push_back(tok);
        if (tok == kEos) break;
        state.prev = tok;
    }
    return tokens;
}

// Per-token log probabilities of a fixed sequence and the exact gradient of
// their sum. An empty sequence yields a zero gradient.
template <typename Scalar>
std::pair<VectorX<Scalar>, PolicyParamsT<Scalar>> logprob_and_grad(
    const PolicyParamsT<Scalar>& params, const VectorX<Scalar>& features, const TokenSeq& tokens) {
    if (tokens.empty()) return {VectorX<Scalar>(0), zeros_like(params)};
    const auto cache = detail::teacher_forced(params, features, tokens);
    const int T = static_cast<int>(tokens.size());
    MatrixX<Scalar> dlogits = -cache.probs;
    for (int t = 0; t < T; ++t) dlogits(tokens[static_cast<size_t>(t)], t) += Scalar(1);
    return {cache.logp, detail::grad_from_logits(params, features, tokens, cache, dlogits)};
}

}  // namespace countrl
