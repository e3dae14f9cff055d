#include <cmath>
#include <limits>
#include <memory>

#include "grat/autodiff/ops.hpp"
#include "op_support.hpp"

namespace grat::ad {

double AttentionResult::weight(std::size_t head, std::size_t i, std::size_t j) const {
  const std::size_t n = output.rows();
  const std::size_t m = weights.size() / (heads * n);
  return weights[(head * n + i) * m + j];
}

namespace {

struct AttentionCache {
  std::vector<double> scores;   // raw Q_h K_h^T per head, heads x n x m
  std::vector<double> weights;  // softmax output per head
};

AttentionResult attention_impl(const Tensor& q, const Tensor& k, const Tensor& v, const Tensor* gamma,
                               const Tensor* beta, const Mask* mask, std::size_t heads) {
  detail::require_matrix(q, "attention");
  detail::require_matrix(k, "attention");
  detail::require_matrix(v, "attention");
  const std::size_t n = q.rows(), m = k.rows(), d = q.cols();
  if (k.cols() != d || v.cols() != d || v.rows() != m) {
    throw DimensionError("attention: Q " + shape_string(q.shape()) + ", K " + shape_string(k.shape()) + ", V " +
                         shape_string(v.shape()) + " do not agree");
  }
  if (heads == 0 || d % heads != 0) {
    throw ContractError("attention: width " + std::to_string(d) + " not divisible into " + std::to_string(heads) +
                        " heads");
  }
  const Shape logit_shape{n, m};
  if (gamma && (gamma->shape() != logit_shape || beta->shape() != logit_shape)) {
    throw DimensionError("attention: gamma " + shape_string(gamma->shape()) + " / beta " +
                         shape_string(beta->shape()) + " must be " + shape_string(logit_shape));
  }
  if (mask && (mask->rows != n || mask->cols != m)) {
    throw DimensionError("attention: mask [" + std::to_string(mask->rows) + "x" + std::to_string(mask->cols) +
                         "] must be " + shape_string(logit_shape));
  }

  const std::size_t dk = d / heads;
  const double root = std::sqrt(static_cast<double>(dk));
  auto cache = std::make_shared<AttentionCache>();
  cache->scores.assign(heads * n * m, 0.0);
  cache->weights.assign(heads * n * m, 0.0);
  std::vector<double> out(n * d, 0.0);
  std::vector<double> logits(m);
  std::size_t dead = 0;
  const double* pq = q.data().data();
  const double* pk = k.data().data();
  const double* pv = v.data().data();

  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t c0 = h * dk;
    for (std::size_t i = 0; i < n; ++i) {
      double* s_row = cache->scores.data() + (h * n + i) * m;
      double* p_row = cache->weights.data() + (h * n + i) * m;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j) {
        if (mask && !(*mask)(i, j)) continue;
        double s = 0.0;
        for (std::size_t c = 0; c < dk; ++c) s += pq[i * d + c0 + c] * pk[j * d + c0 + c];
        s_row[j] = s;
        if (gamma) {
          logits[j] = ((*gamma)[i * m + j] * s + (*beta)[i * m + j]) / root;
        } else {
          logits[j] = s / root;
        }
        if (logits[j] > mx) mx = logits[j];
      }
      if (mx == -std::numeric_limits<double>::infinity()) {
        if (h == 0) ++dead;
        continue;
      }
      double z = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (mask && !(*mask)(i, j)) continue;
        p_row[j] = std::exp(logits[j] - mx);
        z += p_row[j];
      }
      for (std::size_t j = 0; j < m; ++j) {
        if (mask && !(*mask)(i, j)) continue;
        p_row[j] /= z;
        const double w = p_row[j];
        for (std::size_t c = 0; c < dk; ++c) out[i * d + c0 + c] += w * pv[j * d + c0 + c];
      }
    }
  }

  std::vector<double> weights = cache->weights;
  bool track = detail::tracking({&q, &k, &v});
  if (gamma) track = track || detail::tracking({gamma, beta});
  auto nq = q.handle(), nk = k.handle(), nv = v.handle();
  std::shared_ptr<detail::TensorNode> ng = gamma ? gamma->handle() : nullptr;
  std::shared_ptr<detail::TensorNode> nb = beta ? beta->handle() : nullptr;
  const Mask mask_copy = mask ? *mask : Mask(n, m, true);

  Tensor output = detail::emit(
      {n, d}, std::move(out), track,
      [cache, nq, nk, nv, ng, nb, mask_copy, n, m, d, dk, heads, root](const std::vector<double>& g) {
        std::vector<double>* gq = nq->requires_grad ? &nq->grad_buffer() : nullptr;
        std::vector<double>* gk = nk->requires_grad ? &nk->grad_buffer() : nullptr;
        std::vector<double>* gv = nv->requires_grad ? &nv->grad_buffer() : nullptr;
        std::vector<double>* gg = ng && ng->requires_grad ? &ng->grad_buffer() : nullptr;
        std::vector<double>* gb = nb && nb->requires_grad ? &nb->grad_buffer() : nullptr;
        std::vector<double> dp(m), ds(m);
        for (std::size_t h = 0; h < heads; ++h) {
          const std::size_t c0 = h * dk;
          for (std::size_t i = 0; i < n; ++i) {
            const double* p_row = cache->weights.data() + (h * n + i) * m;
            const double* s_row = cache->scores.data() + (h * n + i) * m;
            double dot = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
              dp[j] = 0.0;
              if (!mask_copy(i, j) || p_row[j] == 0.0) continue;
              double acc = 0.0;
              for (std::size_t c = 0; c < dk; ++c) acc += g[i * d + c0 + c] * nv->data[j * d + c0 + c];
              dp[j] = acc;
              dot += acc * p_row[j];
              if (gv) {
                for (std::size_t c = 0; c < dk; ++c) (*gv)[j * d + c0 + c] += p_row[j] * g[i * d + c0 + c];
              }
            }
            for (std::size_t j = 0; j < m; ++j) {
              ds[j] = 0.0;
              if (!mask_copy(i, j) || p_row[j] == 0.0) continue;
              const double dlogit = p_row[j] * (dp[j] - dot) / root;
              if (ng) {
                ds[j] = dlogit * ng->data[i * m + j];
                if (gg) (*gg)[i * m + j] += dlogit * s_row[j];
                if (gb) (*gb)[i * m + j] += dlogit;
              } else {
                ds[j] = dlogit;
              }
            }
            for (std::size_t j = 0; j < m; ++j) {
              if (ds[j] == 0.0) continue;
              for (std::size_t c = 0; c < dk; ++c) {
                if (gq) (*gq)[i * d + c0 + c] += ds[j] * nk->data[j * d + c0 + c];
                if (gk) (*gk)[j * d + c0 + c] += ds[j] * nq->data[i * d + c0 + c];
              }
            }
          }
        }
      });
  return AttentionResult{std::move(output), std::move(weights), heads, dead};
}

}  // namespace

AttentionResult film_attention(const Tensor& q, const Tensor& k, const Tensor& v, const Tensor& gamma,
                               const Tensor& beta, const Mask* mask, std::size_t heads) {
  return attention_impl(q, k, v, &gamma, &beta, mask, heads);
}

AttentionResult scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v, const Mask* mask,
                                     std::size_t heads) {
  return attention_impl(q, k, v, nullptr, nullptr, mask, heads);
}

}  // namespace grat::ad
