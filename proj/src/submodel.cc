// Copyright 2026 The Kamino Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kamino/submodel.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "kamino/status.h"
#include "nlohmann/json.hpp"

namespace kamino {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

double Center(const AttributeSpec& spec) { return 0.5 * (spec.lo + spec.hi); }
// Standard deviation of the uniform distribution on the range.
double Scale(const AttributeSpec& spec) {
  return (spec.hi - spec.lo) / std::sqrt(12.0);
}

void Softmax(std::span<double> v) {
  const double peak = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - peak);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

}  // namespace

struct SubModel::Forward {
  std::vector<double> z;        // m x d context embeddings
  std::vector<double> hidden;   // m x d numerical pre-activations
  std::vector<double> xbar;     // m standardized numerical inputs
  std::vector<double> weights;  // m attention weights
  std::vector<double> h;        // d context vector
};

absl::StatusOr<SubModel> SubModel::Create(const Schema& schema,
                                          std::vector<size_t> context,
                                          Unit target, int embed_dim,
                                          RandomSource& rng) {
  if (context.empty()) {
    return MakeError(ErrorKind::kEmptyContext,
                     "a sub-model needs at least one context attribute");
  }
  if (target.empty() || embed_dim <= 0) {
    return MakeError(ErrorKind::kOutOfRange, "empty target or dimension");
  }
  SubModel m;
  m.context_ = std::move(context);
  m.target_ = std::move(target);
  m.dim_ = embed_dim;
  m.Layout(schema);

  const double d = embed_dim;
  const double table_sd = 1.0 / std::sqrt(d);
  for (const ContextSlot& slot : m.slots_) {
    double* p = m.params_.data() + slot.offset;
    if (!slot.numerical) {
      for (size_t i = 0; i < slot.domain * embed_dim; ++i) {
        p[i] = rng.Normal(0, table_sd);
      }
    } else {
      // A, c, B, d.
      for (int i = 0; i < embed_dim; ++i) p[i] = rng.Normal(0, 1);
      for (int i = 0; i < embed_dim; ++i) p[embed_dim + i] = 0.0;
      for (int i = 0; i < embed_dim * embed_dim; ++i) {
        p[2 * embed_dim + i] = rng.Normal(0, table_sd);
      }
    }
  }
  for (int i = 0; i < embed_dim; ++i) {
    m.params_[m.query_offset_ + i] = rng.Normal(0, 0.1);
  }
  double* head = m.params_.data() + m.head_offset_;
  if (!m.numerical_target_) {
    for (size_t i = 0; i < m.target_size_ * embed_dim; ++i) {
      head[i] = rng.Normal(0, table_sd);
    }
  } else {
    for (int i = 0; i < embed_dim; ++i) head[i] = rng.Normal(0, 0.01);
    for (int i = 0; i < embed_dim; ++i)
      head[embed_dim + 1 + i] = rng.Normal(0, 0.01);
  }
  return m;
}

void SubModel::Layout(const Schema& schema) {
  const size_t d = dim_;
  size_t offset = 0;
  slots_.clear();
  for (size_t attr : context_) {
    const AttributeSpec& spec = schema.attribute(attr);
    ContextSlot slot{attr, spec.is_numerical(), offset, 0, 0.0, 1.0};
    if (slot.numerical) {
      slot.center = Center(spec);
      slot.scale = Scale(spec);
      offset += 2 * d + d * d + d;
    } else {
      slot.domain = spec.categories.size();
      offset += slot.domain * d;
    }
    slots_.push_back(slot);
  }
  query_offset_ = offset;
  offset += d;
  head_offset_ = offset;
  const AttributeSpec& first = schema.attribute(target_.front());
  numerical_target_ = target_.size() == 1 && first.is_numerical();
  if (numerical_target_) {
    target_size_ = 0;
    target_center_ = Center(first);
    target_scale_ = Scale(first);
    offset += 2 * d + 2;
  } else {
    target_size_ = UnitDomainSize(schema, target_);
    target_radix_.clear();
    for (size_t a : target_)
      target_radix_.push_back(schema.attribute(a).DomainSize());
    offset += target_size_ * d + target_size_;
  }
  params_.assign(offset, 0.0);
}

std::pair<size_t, size_t> SubModel::ContextBlock(size_t position) const {
  const size_t d = dim_;
  const ContextSlot& slot = slots_[position];
  return {slot.offset, slot.numerical ? 3 * d + d * d : slot.domain * d};
}

void SubModel::RunForward(const double* row, Forward* f) const {
  const size_t d = dim_, m = slots_.size();
  const double* p = params_.data();
  f->z.assign(m * d, 0.0);
  f->hidden.assign(m * d, 0.0);
  f->xbar.assign(m, 0.0);
  f->weights.assign(m, 0.0);
  f->h.assign(d, 0.0);
  for (size_t i = 0; i < m; ++i) {
    const ContextSlot& slot = slots_[i];
    double* z = f->z.data() + i * d;
    if (!slot.numerical) {
      const double* e =
          p + slot.offset + static_cast<size_t>(row[slot.attr]) * d;
      std::copy(e, e + d, z);
      continue;
    }
    const double x = (row[slot.attr] - slot.center) / slot.scale;
    f->xbar[i] = x;
    const double* a = p + slot.offset;
    const double* c = a + d;
    const double* b = c + d;
    const double* bias = b + d * d;
    double* u = f->hidden.data() + i * d;
    for (size_t j = 0; j < d; ++j) u[j] = a[j] * x + c[j];
    for (size_t r = 0; r < d; ++r) {
      double acc = bias[r];
      for (size_t j = 0; j < d; ++j) acc += b[r * d + j] * std::max(0.0, u[j]);
      z[r] = acc;
    }
  }
  const double* q = p + query_offset_;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  for (size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) s += q[j] * f->z[i * d + j];
    f->weights[i] = s * inv_sqrt_d;
  }
  Softmax(f->weights);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < d; ++j) f->h[j] += f->weights[i] * f->z[i * d + j];
  }
}

double SubModel::Loss(const double* row, std::span<double> grad) const {
  Forward f;
  RunForward(row, &f);
  const size_t d = dim_, m = slots_.size();
  const double* p = params_.data();
  const double* head = p + head_offset_;
  const bool want_grad = !grad.empty();
  std::vector<double> dh(d, 0.0);
  double loss = 0.0;

  if (!numerical_target_) {
    const size_t V = target_size_;
    size_t y = 0;
    for (size_t t = 0; t < target_.size(); ++t) {
      y = y * target_radix_[t] + static_cast<size_t>(row[target_[t]]);
    }
    std::vector<double> logits(V);
    for (size_t v = 0; v < V; ++v) {
      double s = head[V * d + v];
      for (size_t j = 0; j < d; ++j) s += head[v * d + j] * f.h[j];
      logits[v] = s;
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - peak);
    loss = peak + std::log(sum) - logits[y];
    if (!want_grad) return loss;
    double* g_head = grad.data() + head_offset_;
    for (size_t v = 0; v < V; ++v) {
      const double dl = std::exp(logits[v] - peak) / sum - (v == y ? 1.0 : 0.0);
      for (size_t j = 0; j < d; ++j) {
        g_head[v * d + j] += dl * f.h[j];
        dh[j] += dl * head[v * d + j];
      }
      g_head[V * d + v] += dl;
    }
  } else {
    const double* wm = head;
    const double bm = head[d];
    const double* ws = head + d + 1;
    const double bs = head[2 * d + 1];
    double mu = bm, ls = bs;
    for (size_t j = 0; j < d; ++j) {
      mu += wm[j] * f.h[j];
      ls += ws[j] * f.h[j];
    }
    const double y = (row[target_.front()] - target_center_) / target_scale_;
    const double sigma = std::exp(ls);
    const double r = (y - mu) / sigma;
    loss = 0.5 * r * r + ls + kHalfLog2Pi;
    if (!want_grad) return loss;
    const double dmu = -r / sigma;
    const double dls = 1.0 - r * r;
    double* g_head = grad.data() + head_offset_;
    for (size_t j = 0; j < d; ++j) {
      g_head[j] += dmu * f.h[j];
      g_head[d + 1 + j] += dls * f.h[j];
      dh[j] = dmu * wm[j] + dls * ws[j];
    }
    g_head[d] += dmu;
    g_head[2 * d + 1] += dls;
  }

  // Attention.
  const double* q = p + query_offset_;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> dw(m, 0.0);
  double mean_dw = 0.0;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < d; ++j) dw[i] += dh[j] * f.z[i * d + j];
    mean_dw += f.weights[i] * dw[i];
  }
  double* g_query = grad.data() + query_offset_;
  std::vector<double> dz(d);
  for (size_t i = 0; i < m; ++i) {
    const double ds = f.weights[i] * (dw[i] - mean_dw);
    for (size_t j = 0; j < d; ++j) {
      dz[j] = f.weights[i] * dh[j] + ds * q[j] * inv_sqrt_d;
      g_query[j] += ds * f.z[i * d + j] * inv_sqrt_d;
    }
    const ContextSlot& slot = slots_[i];
    double* g = grad.data() + slot.offset;
    if (!slot.numerical) {
      double* ge = g + static_cast<size_t>(row[slot.attr]) * d;
      for (size_t j = 0; j < d; ++j) ge[j] += dz[j];
      continue;
    }
    const double* b = p + slot.offset + 2 * d;
    const double* u = f.hidden.data() + i * d;
    double* ga = g;
    double* gc = g + d;
    double* gb = g + 2 * d;
    double* gbias = gb + d * d;
    for (size_t r = 0; r < d; ++r) {
      gbias[r] += dz[r];
      for (size_t j = 0; j < d; ++j)
        gb[r * d + j] += dz[r] * std::max(0.0, u[j]);
    }
    for (size_t j = 0; j < d; ++j) {
      if (u[j] <= 0.0) continue;
      double du = 0.0;
      for (size_t r = 0; r < d; ++r) du += b[r * d + j] * dz[r];
      ga[j] += du * f.xbar[i];
      gc[j] += du;
    }
  }
  return loss;
}

void SubModel::PredictInto(const double* row, Prediction* out) const {
  Forward f;
  RunForward(row, &f);
  const size_t d = dim_;
  const double* head = params_.data() + head_offset_;
  if (!numerical_target_) {
    const size_t V = target_size_;
    out->probs.resize(V);
    for (size_t v = 0; v < V; ++v) {
      double s = head[V * d + v];
      for (size_t j = 0; j < d; ++j) s += head[v * d + j] * f.h[j];
      out->probs[v] = s;
    }
    Softmax(out->probs);
    return;
  }
  double mu = head[d], ls = head[2 * d + 1];
  for (size_t j = 0; j < d; ++j) {
    mu += head[j] * f.h[j];
    ls += head[d + 1 + j] * f.h[j];
  }
  out->probs.clear();
  out->mean = target_center_ + target_scale_ * mu;
  out->stddev = target_scale_ * std::exp(std::clamp(ls, -30.0, 30.0));
}

absl::StatusOr<Prediction> SubModel::Predict(
    std::span<const double> row) const {
  for (const ContextSlot& slot : slots_) {
    if (slot.attr >= row.size()) {
      return MakeError(ErrorKind::kUnknownContextValue, "row too short");
    }
    const double v = row[slot.attr];
    const bool ok = slot.numerical
                        ? std::isfinite(v)
                        : (v >= 0 && v < static_cast<double>(slot.domain) &&
                           v == std::floor(v));
    if (!ok) {
      return MakeError(ErrorKind::kUnknownContextValue,
                       absl::StrCat("value ", v, " of context attribute #",
                                    slot.attr, " has no embedding"));
    }
  }
  Prediction out;
  PredictInto(row.data(), &out);
  return out;
}

void SubModel::WarmStart(const EmbeddingStore& store) {
  for (size_t i = 0; i < slots_.size(); ++i) {
    auto it = store.blocks.find(slots_[i].attr);
    const auto [offset, length] = ContextBlock(i);
    if (it != store.blocks.end() && it->second.size() == length) {
      std::copy(it->second.begin(), it->second.end(), params_.begin() + offset);
    }
  }
  if (store.query.size() == static_cast<size_t>(dim_)) {
    std::copy(store.query.begin(), store.query.end(),
              params_.begin() + query_offset_);
  }
}

void SubModel::Export(EmbeddingStore* store) const {
  for (size_t i = 0; i < slots_.size(); ++i) {
    const auto [offset, length] = ContextBlock(i);
    store->blocks[slots_[i].attr].assign(params_.begin() + offset,
                                         params_.begin() + offset + length);
  }
  store->query.assign(params_.begin() + query_offset_,
                      params_.begin() + query_offset_ + dim_);
  if (!numerical_target_ && target_.size() == 1) {
    store->blocks[target_.front()].assign(
        params_.begin() + head_offset_,
        params_.begin() + head_offset_ + target_size_ * dim_);
  }
}

nlohmann::json SubModel::ToJson(const Schema& schema) const {
  nlohmann::json json;
  json["context"] = nlohmann::json::array();
  for (size_t a : context_) json["context"].push_back(schema.attribute(a).name);
  json["target"] = nlohmann::json::array();
  for (size_t a : target_) json["target"].push_back(schema.attribute(a).name);
  json["embed_dim"] = dim_;
  json["params"] = params_;
  return json;
}

absl::StatusOr<SubModel> SubModel::FromJson(const nlohmann::json& json,
                                            const Schema& schema) {
  auto names = [&](const char* key) -> absl::StatusOr<std::vector<size_t>> {
    std::vector<size_t> out;
    if (!json.contains(key) || !json[key].is_array()) {
      return MakeError(ErrorKind::kParseError, absl::StrCat("missing ", key));
    }
    for (const auto& item : json[key]) {
      auto idx = schema.IndexOf(item.get<std::string>());
      if (!idx) {
        return MakeError(ErrorKind::kUnknownAttribute, item.get<std::string>());
      }
      out.push_back(*idx);
    }
    return out;
  };
  SubModel m;
  KAMINO_ASSIGN_OR_RETURN(m.context_, names("context"));
  KAMINO_ASSIGN_OR_RETURN(m.target_, names("target"));
  if (m.context_.empty() || m.target_.empty()) {
    return MakeError(ErrorKind::kEmptyContext, "sub-model without context");
  }
  m.dim_ = json.value("embed_dim", 0);
  if (m.dim_ <= 0) return MakeError(ErrorKind::kParseError, "bad embed_dim");
  m.Layout(schema);
  std::vector<double> params = json.value("params", std::vector<double>());
  if (params.size() != m.params_.size()) {
    return MakeError(ErrorKind::kSchemaMismatch,
                     absl::StrCat("expected ", m.params_.size(),
                                  " parameters, got ", params.size()));
  }
  m.params_ = std::move(params);
  return m;
}

}  // namespace kamino
