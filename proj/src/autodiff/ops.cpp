#include "grat/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "op_support.hpp"

namespace grat::ad {

using detail::emit;
using detail::require_matrix;
using detail::require_same_shape;
using detail::tracking;

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw DimensionError("matmul: inner extents differ for " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()));
  }
  std::vector<double> c(m * n, 0.0);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = c.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double s = pa[i * k + p];
      const double* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += s * brow[j];
    }
  }
  auto na = a.handle(), nb = b.handle();
  return emit({m, n}, std::move(c), tracking({&a, &b}), [na, nb, m, k, n](const std::vector<double>& g) {
    if (na->requires_grad) {
      auto& ga = na->grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * nb->data[p * n + j];
          ga[i * k + p] += s;
        }
    }
    if (nb->requires_grad) {
      auto& gb = nb->grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double s = na->data[i * k + p];
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += s * g[i * n + j];
        }
    }
  });
}

Tensor transpose(const Tensor& a) {
  require_matrix(a, "transpose");
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a[i * n + j];
  auto na = a.handle();
  return emit({n, m}, std::move(out), tracking({&a}), [na, m, n](const std::vector<double>& g) {
    auto& ga = na->grad_buffer();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g[j * m + i];
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (numel(shape) != a.numel()) {
    throw DimensionError("reshape: cannot view " + shape_string(a.shape()) + " as " + shape_string(shape));
  }
  auto na = a.handle();
  std::vector<double> data(a.data().begin(), a.data().end());
  return emit(std::move(shape), std::move(data), tracking({&a}), [na](const std::vector<double>& g) {
    auto& ga = na->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

namespace {

template <class Fwd, class Bwd>
Tensor binary_elementwise(const Tensor& a, const Tensor& b, const char* op, Fwd fwd, Bwd bwd) {
  require_same_shape(a, b, op);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(a[i], b[i]);
  auto na = a.handle(), nb = b.handle();
  return emit(a.shape(), std::move(out), tracking({&a, &b}), [na, nb, bwd](const std::vector<double>& g) {
    std::vector<double>* ga = na->requires_grad ? &na->grad_buffer() : nullptr;
    std::vector<double>* gb = nb->requires_grad ? &nb->grad_buffer() : nullptr;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto [da, db] = bwd(na->data[i], nb->data[i], g[i]);
      if (ga) (*ga)[i] += da;
      if (gb) (*gb)[i] += db;
    }
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double, double g) { return std::pair{g, g}; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double, double g) { return std::pair{g, -g}; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_elementwise(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double x, double y, double g) { return std::pair{g * y, g * x}; });
}

Tensor add_row(const Tensor& a, const Tensor& bias) {
  require_matrix(a, "add_row");
  const std::size_t m = a.rows(), n = a.cols();
  if (bias.numel() != n || bias.rank() != 1) {
    throw DimensionError("add_row: bias " + shape_string(bias.shape()) + " does not broadcast over " +
                         shape_string(a.shape()));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += bias[j];
  auto na = a.handle(), nb = bias.handle();
  return emit({m, n}, std::move(out), tracking({&a, &bias}), [na, nb, m, n](const std::vector<double>& g) {
    if (na->requires_grad) {
      auto& ga = na->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (nb->requires_grad) {
      auto& gb = nb->grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * factor;
  auto na = a.handle();
  return emit(a.shape(), std::move(out), tracking({&a}), [na, factor](const std::vector<double>& g) {
    auto& ga = na->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
  });
}

Tensor add_scalar(const Tensor& a, double value) {
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + value;
  auto na = a.handle();
  return emit(a.shape(), std::move(out), tracking({&a}), [na](const std::vector<double>& g) {
    auto& ga = na->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Tensor tanh(const Tensor& a) {
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(a[i]);
  auto na = a.handle();
  std::vector<double> y = out;
  return emit(a.shape(), std::move(out), tracking({&a}), [na, y = std::move(y)](const std::vector<double>& g) {
    auto& ga = na->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Tensor relu(const Tensor& a) {
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] > 0.0 ? a[i] : 0.0;
  auto na = a.handle();
  return emit(a.shape(), std::move(out), tracking({&a}), [na](const std::vector<double>& g) {
    auto& ga = na->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (na->data[i] > 0.0) ga[i] += g[i];
  });
}

Tensor abs(const Tensor& a) {
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::fabs(a[i]);
  auto na = a.handle();
  return emit(a.shape(), std::move(out), tracking({&a}), [na](const std::vector<double>& g) {
    auto& ga = na->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = na->data[i];
      ga[i] += x > 0.0 ? g[i] : (x < 0.0 ? -g[i] : 0.0);
    }
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ContractError("concat_cols: no operands");
  const std::size_t m = parts.front().rows();
  std::size_t n = 0;
  for (const Tensor& p : parts) {
    require_matrix(p, "concat_cols");
    if (p.rows() != m) {
      throw DimensionError("concat_cols: row counts differ " + shape_string(parts.front().shape()) + " vs " +
                           shape_string(p.shape()));
    }
    n += p.cols();
  }
  std::vector<double> out(m * n);
  std::vector<std::shared_ptr<detail::TensorNode>> nodes;
  std::vector<std::size_t> offsets;
  bool track = false;
  std::size_t off = 0;
  for (const Tensor& p : parts) {
    const std::size_t w = p.cols();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < w; ++j) out[i * n + off + j] = p[i * w + j];
    nodes.push_back(p.handle());
    offsets.push_back(off);
    track = track || tracking({&p});
    off += w;
  }
  return emit({m, n}, std::move(out), track, [nodes, offsets, m, n](const std::vector<double>& g) {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (!nodes[k]->requires_grad) continue;
      auto& gp = nodes[k]->grad_buffer();
      const std::size_t w = nodes[k]->shape[1];
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < w; ++j) gp[i * w + j] += g[i * n + offsets[k] + j];
    }
  });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ContractError("concat_rows: no operands");
  const std::size_t n = parts.front().cols();
  std::size_t m = 0;
  for (const Tensor& p : parts) {
    require_matrix(p, "concat_rows");
    if (p.cols() != n) {
      throw DimensionError("concat_rows: column counts differ " + shape_string(parts.front().shape()) + " vs " +
                           shape_string(p.shape()));
    }
    m += p.rows();
  }
  std::vector<double> out;
  out.reserve(m * n);
  std::vector<std::shared_ptr<detail::TensorNode>> nodes;
  bool track = false;
  for (const Tensor& p : parts) {
    out.insert(out.end(), p.data().begin(), p.data().end());
    nodes.push_back(p.handle());
    track = track || tracking({&p});
  }
  return emit({m, n}, std::move(out), track, [nodes](const std::vector<double>& g) {
    std::size_t off = 0;
    for (const auto& node : nodes) {
      const std::size_t len = node->data.size();
      if (node->requires_grad) {
        auto& gp = node->grad_buffer();
        for (std::size_t i = 0; i < len; ++i) gp[i] += g[off + i];
      }
      off += len;
    }
  });
}

Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t count) {
  require_matrix(a, "slice_rows");
  if (begin + count > a.rows()) {
    throw DimensionError("slice_rows: rows [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                         ") out of " + shape_string(a.shape()));
  }
  const std::size_t n = a.cols();
  std::vector<double> out(a.data().begin() + begin * n, a.data().begin() + (begin + count) * n);
  auto na = a.handle();
  return emit({count, n}, std::move(out), tracking({&a}), [na, begin, n](const std::vector<double>& g) {
    auto& ga = na->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) ga[begin * n + i] += g[i];
  });
}

Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t count) {
  require_matrix(a, "slice_cols");
  if (begin + count > a.cols()) {
    throw DimensionError("slice_cols: columns [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                         ") out of " + shape_string(a.shape()));
  }
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * count);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < count; ++j) out[i * count + j] = a[i * n + begin + j];
  auto na = a.handle();
  return emit({m, count}, std::move(out), tracking({&a}), [na, begin, count, m, n](const std::vector<double>& g) {
    auto& ga = na->grad_buffer();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < count; ++j) ga[i * n + begin + j] += g[i * count + j];
  });
}

Tensor gather_rows(const Tensor& table, const std::vector<std::size_t>& index) {
  require_matrix(table, "gather_rows");
  const std::size_t rows = table.rows(), n = table.cols();
  std::vector<double> out;
  out.reserve(index.size() * n);
  for (std::size_t r : index) {
    if (r >= rows) {
      throw ContractError("gather_rows: index " + std::to_string(r) + " out of range for " +
                          shape_string(table.shape()));
    }
    out.insert(out.end(), table.data().begin() + r * n, table.data().begin() + (r + 1) * n);
  }
  auto nt = table.handle();
  return emit({index.size(), n}, std::move(out), tracking({&table}), [nt, index, n](const std::vector<double>& g) {
    auto& gt = nt->grad_buffer();
    for (std::size_t k = 0; k < index.size(); ++k)
      for (std::size_t j = 0; j < n; ++j) gt[index[k] * n + j] += g[k * n + j];
  });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double x : a.data()) s += x;
  auto na = a.handle();
  return emit({}, {s}, tracking({&a}), [na](const std::vector<double>& g) {
    auto& ga = na->grad_buffer();
    for (double& x : ga) x += g[0];
  });
}

Tensor mean(const Tensor& a) {
  if (a.numel() == 0) throw ContractError("mean of an empty tensor");
  double s = 0.0;
  for (double x : a.data()) s += x;
  const double inv = 1.0 / static_cast<double>(a.numel());
  auto na = a.handle();
  return emit({}, {s * inv}, tracking({&a}), [na, inv](const std::vector<double>& g) {
    auto& ga = na->grad_buffer();
    for (double& x : ga) x += g[0] * inv;
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  require_matrix(x, "layer_norm");
  const std::size_t m = x.rows(), n = x.cols();
  if (gain.numel() != n || bias.numel() != n) {
    throw DimensionError("layer_norm: gain " + shape_string(gain.shape()) + " / bias " + shape_string(bias.shape()) +
                         " do not match " + shape_string(x.shape()));
  }
  std::vector<double> out(m * n), xhat(m * n), inv_std(m);
  for (std::size_t i = 0; i < m; ++i) {
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += x[i * n + j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = x[i * n + j] - mu;
      var += d * d;
    }
    var /= static_cast<double>(n);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat[i * n + j] = (x[i * n + j] - mu) * inv_std[i];
      out[i * n + j] = gain[j] * xhat[i * n + j] + bias[j];
    }
  }
  auto nx = x.handle(), ng = gain.handle(), nb = bias.handle();
  return emit({m, n}, std::move(out), tracking({&x, &gain, &bias}),
              [nx, ng, nb, xhat = std::move(xhat), inv_std = std::move(inv_std), m, n](const std::vector<double>& g) {
                if (ng->requires_grad) {
                  auto& gg = ng->grad_buffer();
                  for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) gg[j] += g[i * n + j] * xhat[i * n + j];
                }
                if (nb->requires_grad) {
                  auto& gb = nb->grad_buffer();
                  for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
                }
                if (nx->requires_grad) {
                  auto& gx = nx->grad_buffer();
                  const double inv_n = 1.0 / static_cast<double>(n);
                  for (std::size_t i = 0; i < m; ++i) {
                    double mean_d = 0.0, mean_dx = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                      const double d = g[i * n + j] * ng->data[j];
                      mean_d += d;
                      mean_dx += d * xhat[i * n + j];
                    }
                    mean_d *= inv_n;
                    mean_dx *= inv_n;
                    for (std::size_t j = 0; j < n; ++j) {
                      const double d = g[i * n + j] * ng->data[j];
                      gx[i * n + j] += inv_std[i] * (d - mean_d - xhat[i * n + j] * mean_dx);
                    }
                  }
                }
              });
}

SoftmaxResult softmax_rows(const Tensor& x, const Mask* mask) {
  require_matrix(x, "softmax_rows");
  const std::size_t m = x.rows(), n = x.cols();
  if (mask && (mask->rows != m || mask->cols != n)) {
    throw DimensionError("softmax_rows: mask [" + std::to_string(mask->rows) + "x" + std::to_string(mask->cols) +
                         "] does not match " + shape_string(x.shape()));
  }
  std::vector<double> p(m * n, 0.0);
  std::size_t dead = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (!mask || (*mask)(i, j)) mx = std::max(mx, x[i * n + j]);
    if (mx == -std::numeric_limits<double>::infinity()) {
      ++dead;
      continue;
    }
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask && !(*mask)(i, j)) continue;
      p[i * n + j] = std::exp(x[i * n + j] - mx);
      z += p[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) p[i * n + j] /= z;
  }
  auto nx = x.handle();
  std::vector<double> saved = p;
  Tensor probs = emit({m, n}, std::move(p), tracking({&x}), [nx, saved = std::move(saved), m, n](const std::vector<double>& g) {
    auto& gx = nx->grad_buffer();
    for (std::size_t i = 0; i < m; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += g[i * n + j] * saved[i * n + j];
      for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += saved[i * n + j] * (g[i * n + j] - dot);
    }
  });
  return SoftmaxResult{std::move(probs), dead};
}

Tensor cross_entropy(const Tensor& logits, const std::vector<std::size_t>& targets) {
  require_matrix(logits, "cross_entropy");
  const std::size_t m = logits.rows(), n = logits.cols();
  if (targets.size() != m) {
    throw DimensionError("cross_entropy: " + std::to_string(targets.size()) + " targets for logits " +
                         shape_string(logits.shape()));
  }
  if (m == 0) return Tensor::scalar(0.0);
  std::vector<double> p(m * n);
  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (targets[i] >= n) {
      throw ContractError("cross_entropy: target " + std::to_string(targets[i]) + " out of " + std::to_string(n) +
                          " classes");
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, logits[i * n + j]);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      p[i * n + j] = std::exp(logits[i * n + j] - mx);
      z += p[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) p[i * n + j] /= z;
    loss -= logits[i * n + targets[i]] - mx - std::log(z);
  }
  const double inv = 1.0 / static_cast<double>(m);
  auto nl = logits.handle();
  return emit({}, {loss * inv}, tracking({&logits}), [nl, p = std::move(p), targets, m, n, inv](const std::vector<double>& g) {
    auto& gl = nl->grad_buffer();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double onehot = j == targets[i] ? 1.0 : 0.0;
        gl[i * n + j] += g[0] * inv * (p[i * n + j] - onehot);
      }
  });
}

}  // namespace grat::ad
