#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stance/text.hpp"

/// Differentiable building blocks for the stance classifier. Every forward
/// function can record what its backward counterpart needs; backward
/// functions accumulate into ParamTensor::grad.
namespace stance::nn {

struct ParamTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;

  ParamTensor() = default;
  ParamTensor(std::string name, std::vector<std::size_t> shape);

  std::size_t size() const noexcept { return value.size(); }
  std::size_t rows() const noexcept { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const noexcept { return shape.size() < 2 ? 1 : shape[1]; }
  void zero_grad();
};

using ParamList = std::vector<ParamTensor*>;

void zero_grads(std::span<ParamTensor* const> params);
void init_uniform(ParamTensor& p, double range, std::mt19937_64& rng);

/// Gate blocks are stacked in the order input, forget, output, candidate.
struct LstmParams {
  ParamTensor W;  // 4h x d
  ParamTensor U;  // 4h x h
  ParamTensor b;  // 4h

  LstmParams() = default;
  LstmParams(const std::string& prefix, std::size_t input_dim, std::size_t hidden);

  std::size_t input_dim() const noexcept { return W.cols(); }
  std::size_t hidden() const noexcept { return U.cols(); }
  ParamList parameters() { return {&W, &U, &b}; }

  /// Uniform(-range, range) weights; forget-gate bias set to `forget_bias`.
  void initialize(std::mt19937_64& rng, double range = 0.1, double forget_bias = 1.0);
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;

  static LstmState zeros(std::size_t hidden) { return {std::vector<double>(hidden), std::vector<double>(hidden)}; }
};

struct LstmStepCache {
  std::vector<double> x, h_prev, c_prev;
  std::vector<double> gates;  // activated i, f, o, g
  std::vector<double> c, tanh_c;
};

/// c' = f*c + i*g, h' = o*tanh(c'). Throws std::invalid_argument on shape mismatch.
LstmState lstm_step(std::span<const double> x, const LstmState& prev, const LstmParams& p,
                    LstmStepCache* cache = nullptr);

struct LstmStepGrad {
  std::vector<double> dx, dh_prev, dc_prev;
};

/// Back-propagates dL/dh' and dL/dc' through one step.
LstmStepGrad lstm_step_backward(const LstmStepCache& cache, LstmParams& p,
                                std::span<const double> dh, std::span<const double> dc);

struct BiLstmInit {
  LstmState forward;
  LstmState backward;
};

struct BiLstmOutput {
  /// Hidden states indexed by sequence position for each direction.
  std::vector<std::vector<double>> forward_h;
  std::vector<std::vector<double>> backward_h;
  LstmState final_forward;   // after reading the last token
  LstmState final_backward;  // after reading the first token
};

struct BiLstmTrace {
  std::vector<TokenId> ids;
  std::vector<LstmStepCache> forward;   // step k reads ids[k]
  std::vector<LstmStepCache> backward;  // step k reads ids[n-1-k]
};

/// Embeds `ids` through the rows of `embedding` (|V| x d) and runs both
/// directions. `init`, when given, seeds each direction's initial state.
BiLstmOutput bilstm_encode(std::span<const TokenId> ids, const ParamTensor& embedding,
                           const LstmParams& fwd, const LstmParams& bwd,
                           const BiLstmInit* init = nullptr, BiLstmTrace* trace = nullptr);

/// Returns gradients with respect to the initial states. Pass a null
/// `embedding` to leave embeddings untouched.
BiLstmInit bilstm_backward(const BiLstmTrace& trace, ParamTensor* embedding, LstmParams& fwd,
                           LstmParams& bwd, const LstmState& d_final_forward,
                           const LstmState& d_final_backward);

std::vector<double> affine(std::span<const double> x, const ParamTensor& W, const ParamTensor& b);
/// Max-subtracted softmax.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> affine_softmax(std::span<const double> x, const ParamTensor& W,
                                   const ParamTensor& b);
/// Accumulates dW, db from dlogits; returns dL/dx.
std::vector<double> affine_backward(std::span<const double> x, ParamTensor& W, ParamTensor& b,
                                    std::span<const double> dlogits);

inline constexpr double kProbFloor = 1e-12;

/// -log(max(probs[gold], 1e-12)).
double cross_entropy(std::span<const double> probs, std::size_t gold);
/// d cross_entropy(softmax(z)) / dz; zero when the floor is active.
std::vector<double> softmax_cross_entropy_grad(std::span<const double> probs, std::size_t gold);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

/// Compares the analytic gradients already stored in `params` against
/// five-point central differences of `loss`: max |a-n| / max(|a|, |n|, 1e-8).
/// Parameter values are restored afterwards.
GradCheckResult gradient_check(const std::function<double()>& loss,
                               std::span<ParamTensor* const> params, double eps = 5e-3);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t t = 0;
};

AdamState make_adam(std::span<ParamTensor* const> params, const AdamConfig& config);

/// Bias-corrected Adam update. Leaves gradients in place. Throws
/// NumericError on a non-finite gradient.
void adam_step(std::span<ParamTensor* const> params, AdamState& state);

double global_grad_norm(std::span<ParamTensor* const> params);
/// Rescales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_grad_norm(std::span<ParamTensor* const> params, double max_norm);

}  // namespace stance::nn
