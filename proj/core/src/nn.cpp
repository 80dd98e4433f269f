#include "stance/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stance/error.hpp"

namespace stance::nn {
namespace {

double sigmoid(double z) {
  if (z >= 0) {
    double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

ParamTensor::ParamTensor(std::string name_, std::vector<std::size_t> shape_)
    : name(std::move(name_)), shape(std::move(shape_)) {
  value.assign(product(shape), 0.0);
  grad.assign(value.size(), 0.0);
}

void ParamTensor::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

void zero_grads(std::span<ParamTensor* const> params) {
  for (auto* p : params) p->zero_grad();
}

void init_uniform(ParamTensor& p, double range, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-range, range);
  for (auto& v : p.value) v = dist(rng);
}

LstmParams::LstmParams(const std::string& prefix, std::size_t input_dim, std::size_t hidden)
    : W(prefix + ".W", {4 * hidden, input_dim}),
      U(prefix + ".U", {4 * hidden, hidden}),
      b(prefix + ".b", {4 * hidden}) {}

void LstmParams::initialize(std::mt19937_64& rng, double range, double forget_bias) {
  init_uniform(W, range, rng);
  init_uniform(U, range, rng);
  std::fill(b.value.begin(), b.value.end(), 0.0);
  const std::size_t h = hidden();
  std::fill(b.value.begin() + static_cast<std::ptrdiff_t>(h),
            b.value.begin() + static_cast<std::ptrdiff_t>(2 * h), forget_bias);
}

LstmState lstm_step(std::span<const double> x, const LstmState& prev, const LstmParams& p,
                    LstmStepCache* cache) {
  const std::size_t d = p.input_dim();
  const std::size_t h = p.hidden();
  require(x.size() == d, "lstm_step: input size does not match W");
  require(prev.h.size() == h && prev.c.size() == h, "lstm_step: state size does not match U");
  require(p.W.rows() == 4 * h && p.b.size() == 4 * h, "lstm_step: inconsistent parameter shapes");

  std::vector<double> gates(4 * h);
  const double* W = p.W.value.data();
  const double* U = p.U.value.data();
  for (std::size_t r = 0; r < 4 * h; ++r) {
    double z = p.b.value[r];
    const double* wr = W + r * d;
    for (std::size_t k = 0; k < d; ++k) z += wr[k] * x[k];
    const double* ur = U + r * h;
    for (std::size_t k = 0; k < h; ++k) z += ur[k] * prev.h[k];
    gates[r] = r < 3 * h ? sigmoid(z) : std::tanh(z);
  }

  LstmState next{std::vector<double>(h), std::vector<double>(h)};
  std::vector<double> tanh_c(h);
  for (std::size_t k = 0; k < h; ++k) {
    double i = gates[k], f = gates[h + k], o = gates[2 * h + k], g = gates[3 * h + k];
    next.c[k] = f * prev.c[k] + i * g;
    tanh_c[k] = std::tanh(next.c[k]);
    next.h[k] = o * tanh_c[k];
  }
  if (cache) {
    cache->x.assign(x.begin(), x.end());
    cache->h_prev = prev.h;
    cache->c_prev = prev.c;
    cache->gates = std::move(gates);
    cache->c = next.c;
    cache->tanh_c = std::move(tanh_c);
  }
  return next;
}

LstmStepGrad lstm_step_backward(const LstmStepCache& cache, LstmParams& p,
                                std::span<const double> dh, std::span<const double> dc) {
  const std::size_t d = p.input_dim();
  const std::size_t h = p.hidden();
  require(dh.size() == h && dc.size() == h, "lstm_step_backward: gradient size mismatch");

  std::vector<double> dz(4 * h);
  LstmStepGrad out{std::vector<double>(d), std::vector<double>(h), std::vector<double>(h)};
  for (std::size_t k = 0; k < h; ++k) {
    const double i = cache.gates[k], f = cache.gates[h + k], o = cache.gates[2 * h + k],
                 g = cache.gates[3 * h + k];
    const double tc = cache.tanh_c[k];
    const double dc_total = dc[k] + dh[k] * o * (1.0 - tc * tc);
    dz[k] = dc_total * g * i * (1.0 - i);
    dz[h + k] = dc_total * cache.c_prev[k] * f * (1.0 - f);
    dz[2 * h + k] = dh[k] * tc * o * (1.0 - o);
    dz[3 * h + k] = dc_total * i * (1.0 - g * g);
    out.dc_prev[k] = dc_total * f;
  }

  double* gW = p.W.grad.data();
  double* gU = p.U.grad.data();
  const double* W = p.W.value.data();
  const double* U = p.U.value.data();
  for (std::size_t r = 0; r < 4 * h; ++r) {
    const double g = dz[r];
    if (g == 0.0) continue;
    p.b.grad[r] += g;
    double* gwr = gW + r * d;
    const double* wr = W + r * d;
    for (std::size_t k = 0; k < d; ++k) {
      gwr[k] += g * cache.x[k];
      out.dx[k] += g * wr[k];
    }
    double* gur = gU + r * h;
    const double* ur = U + r * h;
    for (std::size_t k = 0; k < h; ++k) {
      gur[k] += g * cache.h_prev[k];
      out.dh_prev[k] += g * ur[k];
    }
  }
  return out;
}

BiLstmOutput bilstm_encode(std::span<const TokenId> ids, const ParamTensor& embedding,
                           const LstmParams& fwd, const LstmParams& bwd, const BiLstmInit* init,
                           BiLstmTrace* trace) {
  require(!ids.empty(), "bilstm_encode: empty sequence");
  require(embedding.shape.size() == 2, "bilstm_encode: embedding must be a matrix");
  const std::size_t dim = embedding.cols();
  require(fwd.input_dim() == dim && bwd.input_dim() == dim,
          "bilstm_encode: embedding width does not match LSTM input size");
  const std::size_t n = ids.size();
  auto row = [&](TokenId id) {
    require(id < embedding.rows(), "bilstm_encode: token id outside the embedding matrix");
    return std::span<const double>(embedding.value.data() + static_cast<std::size_t>(id) * dim, dim);
  };

  BiLstmOutput out;
  out.forward_h.resize(n);
  out.backward_h.resize(n);
  if (trace) {
    trace->ids.assign(ids.begin(), ids.end());
    trace->forward.assign(n, {});
    trace->backward.assign(n, {});
  }

  LstmState state = init ? init->forward : LstmState::zeros(fwd.hidden());
  for (std::size_t t = 0; t < n; ++t) {
    state = lstm_step(row(ids[t]), state, fwd, trace ? &trace->forward[t] : nullptr);
    out.forward_h[t] = state.h;
  }
  out.final_forward = std::move(state);

  state = init ? init->backward : LstmState::zeros(bwd.hidden());
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t t = n - 1 - k;
    state = lstm_step(row(ids[t]), state, bwd, trace ? &trace->backward[k] : nullptr);
    out.backward_h[t] = state.h;
  }
  out.final_backward = std::move(state);
  return out;
}

BiLstmInit bilstm_backward(const BiLstmTrace& trace, ParamTensor* embedding, LstmParams& fwd,
                           LstmParams& bwd, const LstmState& d_final_forward,
                           const LstmState& d_final_backward) {
  const std::size_t n = trace.ids.size();
  auto accumulate_embedding = [&](TokenId id, const std::vector<double>& dx) {
    if (!embedding) return;
    const std::size_t dim = embedding->cols();
    double* g = embedding->grad.data() + static_cast<std::size_t>(id) * dim;
    for (std::size_t k = 0; k < dim; ++k) g[k] += dx[k];
  };

  BiLstmInit grads;
  std::vector<double> dh = d_final_forward.h, dc = d_final_forward.c;
  for (std::size_t t = n; t-- > 0;) {
    auto step = lstm_step_backward(trace.forward[t], fwd, dh, dc);
    accumulate_embedding(trace.ids[t], step.dx);
    dh = std::move(step.dh_prev);
    dc = std::move(step.dc_prev);
  }
  grads.forward = {std::move(dh), std::move(dc)};

  dh = d_final_backward.h;
  dc = d_final_backward.c;
  for (std::size_t k = n; k-- > 0;) {
    auto step = lstm_step_backward(trace.backward[k], bwd, dh, dc);
    accumulate_embedding(trace.ids[n - 1 - k], step.dx);
    dh = std::move(step.dh_prev);
    dc = std::move(step.dc_prev);
  }
  grads.backward = {std::move(dh), std::move(dc)};
  return grads;
}

std::vector<double> affine(std::span<const double> x, const ParamTensor& W, const ParamTensor& b) {
  require(W.shape.size() == 2 && W.cols() == x.size(), "affine: W columns must match input size");
  require(b.size() == W.rows(), "affine: bias size must match W rows");
  std::vector<double> out(W.rows());
  for (std::size_t r = 0; r < W.rows(); ++r) {
    double z = b.value[r];
    const double* wr = W.value.data() + r * x.size();
    for (std::size_t k = 0; k < x.size(); ++k) z += wr[k] * x[k];
    out[r] = z;
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  require(!logits.empty(), "softmax: empty input");
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - mx);
    sum += out[k];
  }
  for (auto& v : out) v /= sum;
  return out;
}

std::vector<double> affine_softmax(std::span<const double> x, const ParamTensor& W,
                                   const ParamTensor& b) {
  return softmax(affine(x, W, b));
}

std::vector<double> affine_backward(std::span<const double> x, ParamTensor& W, ParamTensor& b,
                                    std::span<const double> dlogits) {
  require(dlogits.size() == W.rows() && x.size() == W.cols(), "affine_backward: shape mismatch");
  std::vector<double> dx(x.size());
  for (std::size_t r = 0; r < W.rows(); ++r) {
    const double g = dlogits[r];
    b.grad[r] += g;
    double* gwr = W.grad.data() + r * x.size();
    const double* wr = W.value.data() + r * x.size();
    for (std::size_t k = 0; k < x.size(); ++k) {
      gwr[k] += g * x[k];
      dx[k] += g * wr[k];
    }
  }
  return dx;
}

double cross_entropy(std::span<const double> probs, std::size_t gold) {
  if (gold >= probs.size()) throw std::out_of_range("cross_entropy: gold class out of range");
  return -std::log(std::max(probs[gold], kProbFloor));
}

std::vector<double> softmax_cross_entropy_grad(std::span<const double> probs, std::size_t gold) {
  if (gold >= probs.size()) throw std::out_of_range("cross_entropy: gold class out of range");
  std::vector<double> g(probs.size(), 0.0);
  if (probs[gold] < kProbFloor) return g;
  for (std::size_t k = 0; k < probs.size(); ++k) g[k] = probs[k];
  g[gold] -= 1.0;
  return g;
}

GradCheckResult gradient_check(const std::function<double()>& loss,
                               std::span<ParamTensor* const> params, double eps) {
  GradCheckResult result;
  auto eval = [&] {
    double v = loss();
    if (!std::isfinite(v)) throw NumericError("gradient_check: non-finite loss");
    return v;
  };
  for (auto* p : params) {
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double saved = p->value[i];
      auto at = [&](double v) {
        p->value[i] = v;
        return eval();
      };
      const double near = at(saved + eps) - at(saved - eps);
      const double far = at(saved + 2.0 * eps) - at(saved - 2.0 * eps);
      p->value[i] = saved;
      const double numeric = (8.0 * near - far) / (12.0 * eps);
      const double analytic = p->grad[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic - numeric) / denom;
      ++result.checked;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_param = p->name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

AdamState make_adam(std::span<ParamTensor* const> params, const AdamConfig& config) {
  AdamState s;
  s.config = config;
  for (auto* p : params) {
    s.m.emplace_back(p->size(), 0.0);
    s.v.emplace_back(p->size(), 0.0);
  }
  return s;
}

void adam_step(std::span<ParamTensor* const> params, AdamState& state) {
  require(params.size() == state.m.size(), "adam_step: state does not match parameter list");
  for (auto* p : params) {
    for (double g : p->grad) {
      if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient in " + p->name);
    }
  }
  ++state.t;
  const auto& c = state.config;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
  for (std::size_t j = 0; j < params.size(); ++j) {
    auto& p = *params[j];
    auto& m = state.m[j];
    auto& v = state.v[j];
    require(m.size() == p.size(), "adam_step: moment shape mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad[i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p.value[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
  }
}

double global_grad_norm(std::span<ParamTensor* const> params) {
  double sq = 0.0;
  for (auto* p : params) {
    for (double g : p->grad) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_grad_norm(std::span<ParamTensor* const> params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto* p : params) {
      for (auto& g : p->grad) g *= scale;
    }
  }
  return norm;
}

}  // namespace stance::nn
