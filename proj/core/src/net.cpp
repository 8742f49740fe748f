#include "axiograd/net.hpp"

#include <cmath>
#include <sstream>

#include "axiograd/activations.hpp"

namespace axiograd {

double Activation::apply(double z) const noexcept {
  switch (kind) {
    case ActKind::kIdentity: return z;
    case ActKind::kRelu: return axiograd::relu(z);
    case ActKind::kSoftplus: return axiograd::softplus(z, alpha);
    case ActKind::kSigmoid: return axiograd::sigmoid(z);
    case ActKind::kTanh: return std::tanh(z);
  }
  return z;
}

double Activation::derivative(double z) const noexcept {
  switch (kind) {
    case ActKind::kIdentity: return 1.0;
    case ActKind::kRelu: return z > 0.0 ? 1.0 : 0.0;
    case ActKind::kSoftplus: return softplus_derivative(z, alpha);
    case ActKind::kSigmoid: {
      const double s = axiograd::sigmoid(z);
      return s * (1.0 - s);
    }
    case ActKind::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

std::string to_string(const Activation& a) {
  switch (a.kind) {
    case ActKind::kIdentity: return "identity";
    case ActKind::kRelu: return "relu";
    case ActKind::kSigmoid: return "sigmoid";
    case ActKind::kTanh: return "tanh";
    case ActKind::kSoftplus: {
      std::ostringstream os;
      os.precision(17);
      os << "softplus(" << a.alpha << ")";
      return os.str();
    }
  }
  return "?";
}

LayeredNet::LayeredNet(std::size_t input_dim, std::vector<Layer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  if (input_dim_ == 0) throw InvalidModel("network input dimension must be positive");
  std::size_t width = input_dim_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (const auto* aff = std::get_if<AffineLayer>(&layers_[l])) {
      if (aff->weight.cols() != width) {
        throw InvalidModel("affine layer " + std::to_string(l) + " expects " +
                           std::to_string(aff->weight.cols()) + " inputs, previous width is " +
                           std::to_string(width));
      }
      if (aff->bias.size() != aff->weight.rows()) {
        throw InvalidModel("affine layer " + std::to_string(l) + " bias length does not match rows");
      }
      for (double w : aff->weight.data()) {
        if (!std::isfinite(w)) throw InvalidModel("non-finite weight in layer " + std::to_string(l));
      }
      for (double b : aff->bias) {
        if (!std::isfinite(b)) throw InvalidModel("non-finite bias in layer " + std::to_string(l));
      }
      width = aff->weight.rows();
    } else {
      const auto& ew = std::get<ElementwiseLayer>(layers_[l]);
      if (ew.acts.size() != width) {
        throw InvalidModel("elementwise layer " + std::to_string(l) + " has " + std::to_string(ew.acts.size()) +
                           " tags for width " + std::to_string(width));
      }
      for (const auto& a : ew.acts) {
        if (a.kind == ActKind::kSoftplus && !(a.alpha > 0.0 && std::isfinite(a.alpha))) {
          throw InvalidAlpha("softplus alpha must be positive and finite");
        }
      }
    }
  }
  if (width != 1) throw InvalidModel("network output dimension must be 1, got " + std::to_string(width));
}

std::size_t LayeredNet::relu_count() const noexcept {
  std::size_t n = 0;
  for (const auto& layer : layers_) {
    if (const auto* ew = std::get_if<ElementwiseLayer>(&layer)) {
      for (const auto& a : ew->acts) n += a.kind == ActKind::kRelu ? 1 : 0;
    }
  }
  return n;
}

bool LayeredNet::has_switching_units() const noexcept {
  for (const auto& layer : layers_) {
    if (const auto* ew = std::get_if<ElementwiseLayer>(&layer)) {
      for (const auto& a : ew->acts) {
        if (a.kind == ActKind::kRelu || a.kind == ActKind::kSoftplus) return true;
      }
    }
  }
  return false;
}

double LayeredNet::eval(VecView x) const {
  if (x.size() != input_dim_) throw DimensionMismatch("network input has wrong length");
  Vec h(x.begin(), x.end());
  for (const auto& layer : layers_) {
    if (const auto* aff = std::get_if<AffineLayer>(&layer)) {
      Vec next = aff->weight.apply(h);
      for (std::size_t r = 0; r < next.size(); ++r) next[r] += aff->bias[r];
      h = std::move(next);
    } else {
      const auto& ew = std::get<ElementwiseLayer>(layer);
      for (std::size_t u = 0; u < h.size(); ++u) h[u] = ew.acts[u].apply(h[u]);
    }
  }
  return h[0];
}

LayeredNet::Gradient LayeredNet::gradient(VecView x) const {
  if (x.size() != input_dim_) throw DimensionMismatch("network input has wrong length");
  // Forward pass keeping the input of every layer.
  std::vector<Vec> inputs;
  inputs.reserve(layers_.size());
  Vec h(x.begin(), x.end());
  for (const auto& layer : layers_) {
    inputs.push_back(h);
    if (const auto* aff = std::get_if<AffineLayer>(&layer)) {
      Vec next = aff->weight.apply(h);
      for (std::size_t r = 0; r < next.size(); ++r) next[r] += aff->bias[r];
      h = std::move(next);
    } else {
      const auto& ew = std::get<ElementwiseLayer>(layer);
      for (std::size_t u = 0; u < h.size(); ++u) h[u] = ew.acts[u].apply(h[u]);
    }
  }

  Gradient out;
  Vec adj(1, 1.0);
  for (std::size_t l = layers_.size(); l-- > 0;) {
    if (const auto* aff = std::get_if<AffineLayer>(&layers_[l])) {
      adj = aff->weight.apply_transpose(adj);
    } else {
      const auto& ew = std::get<ElementwiseLayer>(layers_[l]);
      const Vec& pre = inputs[l];
      for (std::size_t u = 0; u < adj.size(); ++u) {
        if (ew.acts[u].kind == ActKind::kRelu && std::abs(pre[u]) < kKinkEpsilon) {
          out.kinks.push_back({l, u});
        }
        adj[u] *= ew.acts[u].derivative(pre[u]);
      }
    }
  }
  out.gradient = std::move(adj);
  return out;
}

void LayeredNet::append_signature(VecView x, std::vector<unsigned char>& out) const {
  if (x.size() != input_dim_) throw DimensionMismatch("network input has wrong length");
  Vec h(x.begin(), x.end());
  for (const auto& layer : layers_) {
    if (const auto* aff = std::get_if<AffineLayer>(&layer)) {
      Vec next = aff->weight.apply(h);
      for (std::size_t r = 0; r < next.size(); ++r) next[r] += aff->bias[r];
      h = std::move(next);
    } else {
      const auto& ew = std::get<ElementwiseLayer>(layer);
      for (std::size_t u = 0; u < h.size(); ++u) {
        if (ew.acts[u].kind == ActKind::kRelu) {
          out.push_back(h[u] > 0.0 ? 1 : 0);
        } else if (ew.acts[u].kind == ActKind::kSoftplus) {
          out.push_back(h[u] > 0.0 ? 3 : 2);
        }
        h[u] = ew.acts[u].apply(h[u]);
      }
    }
  }
}

LayeredNet softplus_smooth(const LayeredNet& net, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidAlpha("softplus alpha must be positive and finite");
  std::vector<Layer> layers = net.layers();
  for (auto& layer : layers) {
    if (auto* ew = std::get_if<ElementwiseLayer>(&layer)) {
      for (auto& a : ew->acts) {
        if (a.kind == ActKind::kRelu) a = Activation::softplus(alpha);
      }
    }
  }
  return LayeredNet(net.input_dim(), std::move(layers));
}

AnalyticExpr to_expression(const LayeredNet& net) {
  if (!net.analytic()) throw UnsupportedNode("relu units have no analytic expression form");
  std::vector<AnalyticExpr> h;
  for (std::size_t i = 0; i < net.input_dim(); ++i) h.push_back(AnalyticExpr::variable(i));
  for (const auto& layer : net.layers()) {
    if (const auto* aff = std::get_if<AffineLayer>(&layer)) {
      std::vector<AnalyticExpr> next;
      for (std::size_t r = 0; r < aff->weight.rows(); ++r) {
        std::vector<AnalyticExpr> terms;
        for (std::size_t c = 0; c < aff->weight.cols(); ++c) {
          const double w = aff->weight(r, c);
          if (w != 0.0) terms.push_back(AnalyticExpr::scale(w, h[c]));
        }
        if (aff->bias[r] != 0.0 || terms.empty()) terms.push_back(AnalyticExpr::constant(aff->bias[r]));
        next.push_back(AnalyticExpr::sum(std::move(terms)));
      }
      h = std::move(next);
    } else {
      const auto& ew = std::get<ElementwiseLayer>(layer);
      for (std::size_t u = 0; u < h.size(); ++u) {
        switch (ew.acts[u].kind) {
          case ActKind::kIdentity: break;
          case ActKind::kSoftplus: h[u] = AnalyticExpr::softplus(h[u], ew.acts[u].alpha); break;
          case ActKind::kSigmoid: h[u] = AnalyticExpr::sigmoid(h[u]); break;
          case ActKind::kTanh: h[u] = AnalyticExpr::tanh(h[u]); break;
          case ActKind::kRelu: break;  // excluded above
        }
      }
    }
  }
  return h[0];
}

}  // namespace axiograd
