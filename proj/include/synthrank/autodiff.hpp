//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_AUTODIFF_HPP
#define SYNTHRANK_AUTODIFF_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "synthrank/errors.hpp"
#include "synthrank/rng.hpp"

namespace synthrank {

// Dense row-major tensor. Rank 2 everywhere in practice; rank 1 is treated
// as a single row. No broadcasting beyond bias-add.
template <typename T>
struct Tensor {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(std::int64_t r, std::int64_t c, T fill = T(0))
      : rows(r), cols(c), data(static_cast<std::size_t>(r * c), fill) {}

  static Tensor scalar(T v) {
    Tensor t(1, 1);
    t.data[0] = v;
    return t;
  }

  std::int64_t numel() const { return rows * cols; }
  T& at(std::int64_t r, std::int64_t c) { return data[r * cols + c]; }
  T at(std::int64_t r, std::int64_t c) const { return data[r * cols + c]; }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.rows = rows;
    out.cols = cols;
    out.data.assign(data.begin(), data.end());
    return out;
  }
};

// Reverse-mode tape. Operations append nodes in topological order; a single
// reverse sweep over the node list accumulates gradients. One tape is
// single-threaded; several tapes may run concurrently over shared
// (immutable) parameter values.
template <typename T>
class Tape {
 public:
  using Id = int;

  Id leaf(Tensor<T> value, bool requires_grad = false) {
    return push(std::move(value), {}, nullptr, requires_grad);
  }

  const Tensor<T>& value(Id id) const { return nodes_[id].value; }
  const Tensor<T>& grad(Id id) const { return nodes_[id].grad; }

  // ---- primitives ----

  Id matmul(Id a, Id b) {
    const Tensor<T>& A = val(a);
    const Tensor<T>& B = val(b);
    if (A.cols != B.rows) throw ValueError("matmul shape mismatch");
    Tensor<T> out(A.rows, B.cols);
    for (std::int64_t i = 0; i < A.rows; ++i) {
      for (std::int64_t k = 0; k < A.cols; ++k) {
        T aik = A.at(i, k);
        if (aik == T(0)) continue;
        const T* brow = B.data.data() + k * B.cols;
        T* orow = out.data.data() + i * out.cols;
        for (std::int64_t j = 0; j < B.cols; ++j) {
          orow[j] += aik * brow[j];
        }
      }
    }
    return push(std::move(out), {a, b}, [](Tape& t, Node& n) {
      const Tensor<T>& A = t.val(n.parents[0]);
      const Tensor<T>& B = t.val(n.parents[1]);
      if (t.wants_grad(n.parents[0])) {
        Tensor<T>& dA = t.grad_buf(n.parents[0]);
        for (std::int64_t i = 0; i < A.rows; ++i) {
          for (std::int64_t j = 0; j < B.cols; ++j) {
            T g = n.grad.at(i, j);
            if (g == T(0)) continue;
            for (std::int64_t k = 0; k < A.cols; ++k) {
              dA.at(i, k) += g * B.at(k, j);
            }
          }
        }
      }
      if (t.wants_grad(n.parents[1])) {
        Tensor<T>& dB = t.grad_buf(n.parents[1]);
        for (std::int64_t i = 0; i < A.rows; ++i) {
          for (std::int64_t j = 0; j < B.cols; ++j) {
            T g = n.grad.at(i, j);
            if (g == T(0)) continue;
            for (std::int64_t k = 0; k < A.cols; ++k) {
              dB.at(k, j) += A.at(i, k) * g;
            }
          }
        }
      }
    });
  }

  // Elementwise addition; b may also be a single row added to every row of a.
  Id add(Id a, Id b) {
    const Tensor<T>& A = val(a);
    const Tensor<T>& B = val(b);
    bool bias = (B.rows == 1 && A.rows != 1 && B.cols == A.cols);
    if (!bias && (A.rows != B.rows || A.cols != B.cols)) {
      throw ValueError("add shape mismatch");
    }
    Tensor<T> out = A;
    for (std::int64_t i = 0; i < A.rows; ++i) {
      for (std::int64_t j = 0; j < A.cols; ++j) {
        out.at(i, j) += bias ? B.at(0, j) : B.at(i, j);
      }
    }
    return push(std::move(out), {a, b}, [bias](Tape& t, Node& n) {
      if (t.wants_grad(n.parents[0])) {
        t.accumulate(n.parents[0], n.grad);
      }
      if (t.wants_grad(n.parents[1])) {
        Tensor<T>& dB = t.grad_buf(n.parents[1]);
        if (bias) {
          for (std::int64_t i = 0; i < n.grad.rows; ++i) {
            for (std::int64_t j = 0; j < n.grad.cols; ++j) {
              dB.at(0, j) += n.grad.at(i, j);
            }
          }
        } else {
          t.accumulate(n.parents[1], n.grad);
        }
      }
    });
  }

  Id sub(Id a, Id b) { return add(a, scale(b, T(-1))); }

  Id mul(Id a, Id b) {
    const Tensor<T>& A = val(a);
    const Tensor<T>& B = val(b);
    if (A.rows != B.rows || A.cols != B.cols) {
      throw ValueError("mul shape mismatch");
    }
    Tensor<T> out = A;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= B.data[i];
    return push(std::move(out), {a, b}, [](Tape& t, Node& n) {
      const Tensor<T>& A = t.val(n.parents[0]);
      const Tensor<T>& B = t.val(n.parents[1]);
      if (t.wants_grad(n.parents[0])) {
        Tensor<T>& dA = t.grad_buf(n.parents[0]);
        for (std::size_t i = 0; i < dA.data.size(); ++i) {
          dA.data[i] += n.grad.data[i] * B.data[i];
        }
      }
      if (t.wants_grad(n.parents[1])) {
        Tensor<T>& dB = t.grad_buf(n.parents[1]);
        for (std::size_t i = 0; i < dB.data.size(); ++i) {
          dB.data[i] += n.grad.data[i] * A.data[i];
        }
      }
    });
  }

  Id scale(Id a, T c) {
    Tensor<T> out = val(a);
    for (T& v : out.data) v *= c;
    return push(std::move(out), {a}, [c](Tape& t, Node& n) {
      if (!t.wants_grad(n.parents[0])) return;
      Tensor<T>& dA = t.grad_buf(n.parents[0]);
      for (std::size_t i = 0; i < dA.data.size(); ++i) {
        dA.data[i] += c * n.grad.data[i];
      }
    });
  }

  Id concat_cols(Id a, Id b) {
    const Tensor<T>& A = val(a);
    const Tensor<T>& B = val(b);
    if (A.rows != B.rows) throw ValueError("concat shape mismatch");
    Tensor<T> out(A.rows, A.cols + B.cols);
    for (std::int64_t i = 0; i < A.rows; ++i) {
      for (std::int64_t j = 0; j < A.cols; ++j) out.at(i, j) = A.at(i, j);
      for (std::int64_t j = 0; j < B.cols; ++j) {
        out.at(i, A.cols + j) = B.at(i, j);
      }
    }
    std::int64_t ac = A.cols;
    return push(std::move(out), {a, b}, [ac](Tape& t, Node& n) {
      const Tensor<T>& G = n.grad;
      if (t.wants_grad(n.parents[0])) {
        Tensor<T>& dA = t.grad_buf(n.parents[0]);
        for (std::int64_t i = 0; i < dA.rows; ++i) {
          for (std::int64_t j = 0; j < dA.cols; ++j) {
            dA.at(i, j) += G.at(i, j);
          }
        }
      }
      if (t.wants_grad(n.parents[1])) {
        Tensor<T>& dB = t.grad_buf(n.parents[1]);
        for (std::int64_t i = 0; i < dB.rows; ++i) {
          for (std::int64_t j = 0; j < dB.cols; ++j) {
            dB.at(i, j) += G.at(i, ac + j);
          }
        }
      }
    });
  }

  Id concat_rows(Id a, Id b) {
    const Tensor<T>& A = val(a);
    const Tensor<T>& B = val(b);
    if (A.cols != B.cols) throw ValueError("concat shape mismatch");
    Tensor<T> out(A.rows + B.rows, A.cols);
    std::copy(A.data.begin(), A.data.end(), out.data.begin());
    std::copy(B.data.begin(), B.data.end(), out.data.begin() + A.data.size());
    std::int64_t ar = A.rows;
    return push(std::move(out), {a, b}, [ar](Tape& t, Node& n) {
      if (t.wants_grad(n.parents[0])) {
        Tensor<T>& dA = t.grad_buf(n.parents[0]);
        for (std::int64_t i = 0; i < dA.rows; ++i) {
          for (std::int64_t j = 0; j < dA.cols; ++j) {
            dA.at(i, j) += n.grad.at(i, j);
          }
        }
      }
      if (t.wants_grad(n.parents[1])) {
        Tensor<T>& dB = t.grad_buf(n.parents[1]);
        for (std::int64_t i = 0; i < dB.rows; ++i) {
          for (std::int64_t j = 0; j < dB.cols; ++j) {
            dB.at(i, j) += n.grad.at(ar + i, j);
          }
        }
      }
    });
  }

  Id col_slice(Id a, std::int64_t from, std::int64_t to) {
    const Tensor<T>& A = val(a);
    if (from < 0 || to > A.cols || from >= to) {
      throw ValueError("col_slice out of range");
    }
    Tensor<T> out(A.rows, to - from);
    for (std::int64_t i = 0; i < A.rows; ++i) {
      for (std::int64_t j = from; j < to; ++j) {
        out.at(i, j - from) = A.at(i, j);
      }
    }
    return push(std::move(out), {a}, [from](Tape& t, Node& n) {
      if (!t.wants_grad(n.parents[0])) return;
      Tensor<T>& dA = t.grad_buf(n.parents[0]);
      for (std::int64_t i = 0; i < n.grad.rows; ++i) {
        for (std::int64_t j = 0; j < n.grad.cols; ++j) {
          dA.at(i, from + j) += n.grad.at(i, j);
        }
      }
    });
  }

  Id row_gather(Id a, std::vector<int> idx) {
    const Tensor<T>& A = val(a);
    Tensor<T> out(static_cast<std::int64_t>(idx.size()), A.cols);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      if (idx[r] < 0 || idx[r] >= A.rows) {
        throw ValueError("row_gather index out of range");
      }
      for (std::int64_t j = 0; j < A.cols; ++j) {
        out.at(static_cast<std::int64_t>(r), j) = A.at(idx[r], j);
      }
    }
    return push(std::move(out), {a},
                [idx = std::move(idx)](Tape& t, Node& n) {
                  if (!t.wants_grad(n.parents[0])) return;
                  Tensor<T>& dA = t.grad_buf(n.parents[0]);
                  for (std::size_t r = 0; r < idx.size(); ++r) {
                    for (std::int64_t j = 0; j < n.grad.cols; ++j) {
                      dA.at(idx[r], j) +=
                          n.grad.at(static_cast<std::int64_t>(r), j);
                    }
                  }
                });
  }

  Id segment_sum(Id a, std::vector<int> seg, int n_segments) {
    const Tensor<T>& A = val(a);
    check_segments(A, seg, n_segments);
    Tensor<T> out(n_segments, A.cols);
    for (std::size_t r = 0; r < seg.size(); ++r) {
      for (std::int64_t j = 0; j < A.cols; ++j) {
        out.at(seg[r], j) += A.at(static_cast<std::int64_t>(r), j);
      }
    }
    return push(std::move(out), {a},
                [seg = std::move(seg)](Tape& t, Node& n) {
                  if (!t.wants_grad(n.parents[0])) return;
                  Tensor<T>& dA = t.grad_buf(n.parents[0]);
                  for (std::size_t r = 0; r < seg.size(); ++r) {
                    for (std::int64_t j = 0; j < n.grad.cols; ++j) {
                      dA.at(static_cast<std::int64_t>(r), j) +=
                          n.grad.at(seg[r], j);
                    }
                  }
                });
  }

  // Per-segment columnwise max; empty segments yield 0. Gradient flows to
  // the first row attaining the max in each segment.
  Id segment_max(Id a, std::vector<int> seg, int n_segments) {
    const Tensor<T>& A = val(a);
    check_segments(A, seg, n_segments);
    Tensor<T> out(n_segments, A.cols);
    std::vector<int> argmax(static_cast<std::size_t>(n_segments) * A.cols, -1);
    for (std::size_t r = 0; r < seg.size(); ++r) {
      for (std::int64_t j = 0; j < A.cols; ++j) {
        auto slot = static_cast<std::size_t>(seg[r]) * A.cols + j;
        T v = A.at(static_cast<std::int64_t>(r), j);
        if (argmax[slot] < 0 || v > out.at(seg[r], j)) {
          out.at(seg[r], j) = v;
          argmax[slot] = static_cast<int>(r);
        }
      }
    }
    for (int s = 0; s < n_segments; ++s) {
      for (std::int64_t j = 0; j < A.cols; ++j) {
        if (argmax[static_cast<std::size_t>(s) * A.cols + j] < 0) {
          out.at(s, j) = T(0);
        }
      }
    }
    return push(std::move(out), {a},
                [argmax = std::move(argmax), seg = std::move(seg)](
                    Tape& t, Node& n) {
                  if (!t.wants_grad(n.parents[0])) return;
                  Tensor<T>& dA = t.grad_buf(n.parents[0]);
                  for (std::int64_t s = 0; s < n.grad.rows; ++s) {
                    for (std::int64_t j = 0; j < n.grad.cols; ++j) {
                      int r = argmax[static_cast<std::size_t>(s) *
                                         n.grad.cols + j];
                      if (r >= 0) dA.at(r, j) += n.grad.at(s, j);
                    }
                  }
                });
  }

  // Softmax over each segment of a column vector (n x 1).
  Id segment_softmax(Id a, std::vector<int> seg, int n_segments) {
    const Tensor<T>& A = val(a);
    if (A.cols != 1) throw ValueError("segment_softmax expects a column");
    check_segments(A, seg, n_segments);
    std::vector<T> seg_max(n_segments, std::numeric_limits<T>::lowest());
    for (std::size_t r = 0; r < seg.size(); ++r) {
      seg_max[seg[r]] = std::max(seg_max[seg[r]], A.data[r]);
    }
    Tensor<T> out(A.rows, 1);
    std::vector<T> seg_sum(n_segments, T(0));
    for (std::size_t r = 0; r < seg.size(); ++r) {
      out.data[r] = std::exp(A.data[r] - seg_max[seg[r]]);
      seg_sum[seg[r]] += out.data[r];
    }
    for (std::size_t r = 0; r < seg.size(); ++r) {
      out.data[r] /= seg_sum[seg[r]];
    }
    return push(std::move(out), {a},
                [seg = std::move(seg), n_segments](Tape& t, Node& n) {
                  if (!t.wants_grad(n.parents[0])) return;
                  const Tensor<T>& S = n.value;
                  std::vector<T> dot(n_segments, T(0));
                  for (std::size_t r = 0; r < seg.size(); ++r) {
                    dot[seg[r]] += n.grad.data[r] * S.data[r];
                  }
                  Tensor<T>& dA = t.grad_buf(n.parents[0]);
                  for (std::size_t r = 0; r < seg.size(); ++r) {
                    dA.data[r] += S.data[r] * (n.grad.data[r] - dot[seg[r]]);
                  }
                });
  }

  // Scales row i of a by the scalar s[i] (s is n x 1).
  Id scale_rows(Id a, Id s) {
    const Tensor<T>& A = val(a);
    const Tensor<T>& S = val(s);
    if (S.cols != 1 || S.rows != A.rows) {
      throw ValueError("scale_rows shape mismatch");
    }
    Tensor<T> out = A;
    for (std::int64_t i = 0; i < A.rows; ++i) {
      for (std::int64_t j = 0; j < A.cols; ++j) out.at(i, j) *= S.data[i];
    }
    return push(std::move(out), {a, s}, [](Tape& t, Node& n) {
      const Tensor<T>& A = t.val(n.parents[0]);
      const Tensor<T>& S = t.val(n.parents[1]);
      if (t.wants_grad(n.parents[0])) {
        Tensor<T>& dA = t.grad_buf(n.parents[0]);
        for (std::int64_t i = 0; i < A.rows; ++i) {
          for (std::int64_t j = 0; j < A.cols; ++j) {
            dA.at(i, j) += n.grad.at(i, j) * S.data[i];
          }
        }
      }
      if (t.wants_grad(n.parents[1])) {
        Tensor<T>& dS = t.grad_buf(n.parents[1]);
        for (std::int64_t i = 0; i < A.rows; ++i) {
          T acc = T(0);
          for (std::int64_t j = 0; j < A.cols; ++j) {
            acc += n.grad.at(i, j) * A.at(i, j);
          }
          dS.data[i] += acc;
        }
      }
    });
  }

  Id relu(Id a) {
    return unary(a, [](T x) { return x > T(0) ? x : T(0); },
                 [](T x, T) { return x > T(0) ? T(1) : T(0); });
  }

  Id leaky_relu(Id a, T slope = T(0.2)) {
    return unary(a, [slope](T x) { return x > T(0) ? x : slope * x; },
                 [slope](T x, T) { return x > T(0) ? T(1) : slope; });
  }

  Id elu(Id a) {
    return unary(a,
                 [](T x) { return x > T(0) ? x : std::expm1(x); },
                 [](T x, T y) { return x > T(0) ? T(1) : y + T(1); });
  }

  Id sigmoid(Id a) {
    return unary(a,
                 [](T x) {
                   if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
                   T e = std::exp(x);
                   return e / (T(1) + e);
                 },
                 [](T, T y) { return y * (T(1) - y); });
  }

  Id log(Id a) {
    return unary(a, [](T x) { return std::log(x); },
                 [](T x, T) { return T(1) / x; });
  }

  Id exp(Id a) {
    return unary(a, [](T x) { return std::exp(x); },
                 [](T, T y) { return y; });
  }

  // log(1 + e^x), computed without overflow. Derivative is sigmoid(x).
  Id softplus(Id a) {
    return unary(a,
                 [](T x) {
                   T m = std::max(x, T(0));
                   return m + std::log1p(std::exp(-std::abs(x)));
                 },
                 [](T x, T) {
                   if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
                   T e = std::exp(x);
                   return e / (T(1) + e);
                 });
  }

  Id square(Id a) {
    return unary(a, [](T x) { return x * x; },
                 [](T x, T) { return T(2) * x; });
  }

  // PReLU with a learned scalar slope (1x1 tensor).
  Id prelu(Id a, Id slope) {
    const Tensor<T>& A = val(a);
    const Tensor<T>& S = val(slope);
    if (S.numel() != 1) throw ValueError("prelu slope must be scalar");
    T s = S.data[0];
    Tensor<T> out = A;
    for (T& v : out.data) v = v > T(0) ? v : s * v;
    return push(std::move(out), {a, slope}, [](Tape& t, Node& n) {
      const Tensor<T>& A = t.val(n.parents[0]);
      T s = t.val(n.parents[1]).data[0];
      if (t.wants_grad(n.parents[0])) {
        Tensor<T>& dA = t.grad_buf(n.parents[0]);
        for (std::size_t i = 0; i < A.data.size(); ++i) {
          dA.data[i] += n.grad.data[i] * (A.data[i] > T(0) ? T(1) : s);
        }
      }
      if (t.wants_grad(n.parents[1])) {
        Tensor<T>& dS = t.grad_buf(n.parents[1]);
        T acc = T(0);
        for (std::size_t i = 0; i < A.data.size(); ++i) {
          if (A.data[i] <= T(0)) acc += n.grad.data[i] * A.data[i];
        }
        dS.data[0] += acc;
      }
    });
  }

  // Inverted dropout: zero with probability `rate`, scale survivors by
  // 1/(1-rate). The mask comes from the given counter-based stream, so a
  // fixed (seed, stream) reproduces it exactly.
  Id dropout(Id a, double rate, RngStream& rng) {
    if (rate < 0.0 || rate >= 1.0) throw ValueError("dropout rate not in [0,1)");
    const Tensor<T>& A = val(a);
    std::vector<T> mask(A.data.size());
    T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
    for (std::size_t i = 0; i < mask.size(); ++i) {
      mask[i] = rng.next_double() < rate ? T(0) : keep_scale;
    }
    Tensor<T> out = A;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= mask[i];
    return push(std::move(out), {a},
                [mask = std::move(mask)](Tape& t, Node& n) {
                  if (!t.wants_grad(n.parents[0])) return;
                  Tensor<T>& dA = t.grad_buf(n.parents[0]);
                  for (std::size_t i = 0; i < dA.data.size(); ++i) {
                    dA.data[i] += n.grad.data[i] * mask[i];
                  }
                });
  }

  Id reduce_sum(Id a) {
    const Tensor<T>& A = val(a);
    T acc = T(0);
    for (T v : A.data) acc += v;
    return push(Tensor<T>::scalar(acc), {a}, [](Tape& t, Node& n) {
      if (!t.wants_grad(n.parents[0])) return;
      Tensor<T>& dA = t.grad_buf(n.parents[0]);
      for (T& v : dA.data) v += n.grad.data[0];
    });
  }

  Id reduce_mean(Id a) {
    const Tensor<T>& A = val(a);
    if (A.numel() == 0) throw ValueError("mean of empty tensor");
    return scale(reduce_sum(a), T(1) / static_cast<T>(A.numel()));
  }

  // ---- reverse sweep ----

  void backward(Id loss) {
    Node& top = nodes_[loss];
    if (top.value.numel() != 1) {
      throw ValueError("backward needs a scalar loss");
    }
    for (Node& n : nodes_) {
      n.grad = Tensor<T>(n.value.rows, n.value.cols);
    }
    top.grad.data[0] = T(1);
    for (int i = loss; i >= 0; --i) {
      Node& n = nodes_[i];
      if (n.backward && n.requires_grad) {
        n.backward(*this, n);
      }
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    std::vector<Id> parents;
    std::function<void(Tape&, Node&)> backward;
    bool requires_grad = false;
  };

  const Tensor<T>& val(Id id) const { return nodes_[id].value; }
  Tensor<T>& grad_buf(Id id) { return nodes_[id].grad; }
  bool wants_grad(Id id) const { return nodes_[id].requires_grad; }

  void accumulate(Id id, const Tensor<T>& g) {
    Tensor<T>& dst = nodes_[id].grad;
    for (std::size_t i = 0; i < dst.data.size(); ++i) {
      dst.data[i] += g.data[i];
    }
  }

  void check_segments(const Tensor<T>& a, const std::vector<int>& seg,
                      int n_segments) const {
    if (static_cast<std::int64_t>(seg.size()) != a.rows) {
      throw ValueError("segment ids must match row count");
    }
    for (int s : seg) {
      if (s < 0 || s >= n_segments) {
        throw ValueError("segment id out of range");
      }
    }
  }

  template <typename F, typename DF>
  Id unary(Id a, F f, DF df) {
    Tensor<T> out = val(a);
    for (T& v : out.data) v = f(v);
    return push(std::move(out), {a}, [f, df](Tape& t, Node& n) {
      if (!t.wants_grad(n.parents[0])) return;
      const Tensor<T>& A = t.val(n.parents[0]);
      Tensor<T>& dA = t.grad_buf(n.parents[0]);
      for (std::size_t i = 0; i < A.data.size(); ++i) {
        dA.data[i] += n.grad.data[i] * df(A.data[i], n.value.data[i]);
      }
    });
  }

  Id push(Tensor<T> value, std::vector<Id> parents,
          std::function<void(Tape&, Node&)> backward,
          bool requires_grad_leaf = false) {
    Node n;
    n.value = std::move(value);
    n.parents = std::move(parents);
    n.backward = std::move(backward);
    n.requires_grad = requires_grad_leaf;
    for (Id p : n.parents) {
      if (nodes_[p].requires_grad) n.requires_grad = true;
    }
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Adam

template <typename T>
struct AdamState {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;

  explicit AdamState(double learning_rate = 3e-4) : lr(learning_rate) {}

  void init(const std::vector<Tensor<T>>& params) {
    m.clear();
    v.clear();
    for (const Tensor<T>& p : params) {
      m.emplace_back(p.rows, p.cols);
      v.emplace_back(p.rows, p.cols);
    }
    step = 0;
  }
};

// Standard bias-corrected Adam update, in place.
template <typename T>
void adam_step(std::vector<Tensor<T>>& params,
               const std::vector<Tensor<T>>& grads, AdamState<T>& state) {
  if (params.size() != grads.size()) {
    throw ValueError("adam: params/grads size mismatch");
  }
  if (state.m.size() != params.size()) {
    state.init(params);
  }
  state.step += 1;
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (params[p].numel() != grads[p].numel()) {
      throw ValueError("adam: gradient shape mismatch");
    }
    for (std::size_t i = 0; i < params[p].data.size(); ++i) {
      double g = static_cast<double>(grads[p].data[i]);
      double m = state.beta1 * static_cast<double>(state.m[p].data[i]) +
                 (1.0 - state.beta1) * g;
      double v = state.beta2 * static_cast<double>(state.v[p].data[i]) +
                 (1.0 - state.beta2) * g * g;
      state.m[p].data[i] = static_cast<T>(m);
      state.v[p].data[i] = static_cast<T>(v);
      double mhat = m / bc1;
      double vhat = v / bc2;
      params[p].data[i] -= static_cast<T>(
          state.lr * mhat / (std::sqrt(vhat) + state.eps));
    }
  }
}

}  // namespace synthrank

#endif
