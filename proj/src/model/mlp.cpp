#include <algorithm>
#include <cmath>
#include <numeric>

#include "covidprep/kernels.hpp"
#include "internal.hpp"

namespace covidprep::model {

MlpNetwork mlp_init(std::size_t inputs, const std::vector<int>& hidden, Rng& rng) {
  MlpNetwork net;
  std::size_t in = inputs;
  auto add = [&](std::size_t out) {
    DenseLayer layer{in, out, std::vector<double>(in * out), std::vector<double>(out, 0.0)};
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (double& w : layer.weights) w = rng.uniform(-limit, limit);
    net.layers.push_back(std::move(layer));
    in = out;
  };
  for (int width : hidden) add(static_cast<std::size_t>(width));
  add(1);
  return net;
}

namespace {

struct Workspace {
  std::vector<std::vector<double>> act;  // act[0] = input, act[l+1] = output of layer l
  std::vector<std::vector<double>> delta;

  explicit Workspace(const MlpNetwork& net) {
    act.resize(net.layers.size() + 1);
    delta.resize(net.layers.size());
    act[0].resize(net.layers.front().in);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      act[l + 1].resize(net.layers[l].out);
      delta[l].resize(net.layers[l].out);
    }
  }
};

double forward(const MlpNetwork& net, std::span<const double> x, Workspace& ws) {
  std::copy(x.begin(), x.end(), ws.act[0].begin());
  const std::size_t last = net.layers.size() - 1;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const DenseLayer& layer = net.layers[l];
    const auto& a = ws.act[l];
    auto& z = ws.act[l + 1];
    for (std::size_t o = 0; o < layer.out; ++o) {
      double v = layer.bias[o] + kernels::dot({layer.weights.data() + o * layer.in, layer.in}, a);
      z[o] = l < last ? std::max(v, 0.0) : v;
    }
  }
  return ws.act.back()[0];
}

void zero(MlpNetwork& g) {
  for (auto& layer : g.layers) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
}

// 0.5 * mean squared error over `rows`; accumulates the gradient into `grad`
// (which must be zeroed by the caller) when given.
double batch_loss(const MlpNetwork& net, const Matrix& X, std::span<const double> y,
                  std::span<const std::size_t> rows, MlpNetwork* grad, Workspace& ws) {
  const double inv_m = 1.0 / static_cast<double>(rows.size());
  double loss = 0.0;
  for (std::size_t r : rows) {
    const double err = forward(net, X.row(r), ws) - y[r];
    loss += 0.5 * err * err * inv_m;
    if (!grad) continue;
    ws.delta.back()[0] = err * inv_m;
    for (std::size_t l = net.layers.size(); l-- > 0;) {
      const DenseLayer& layer = net.layers[l];
      DenseLayer& g = grad->layers[l];
      const auto& a = ws.act[l];
      const auto& d = ws.delta[l];
      for (std::size_t o = 0; o < layer.out; ++o) {
        if (d[o] == 0.0) continue;
        g.bias[o] += d[o];
        kernels::axpy(d[o], a, {g.weights.data() + o * layer.in, layer.in});
      }
      if (l == 0) break;
      auto& prev = ws.delta[l - 1];
      std::fill(prev.begin(), prev.end(), 0.0);
      for (std::size_t o = 0; o < layer.out; ++o)
        if (d[o] != 0.0) kernels::axpy(d[o], {layer.weights.data() + o * layer.in, layer.in}, prev);
      for (std::size_t i = 0; i < prev.size(); ++i)
        if (!(a[i] > 0.0)) prev[i] = 0.0;
    }
  }
  return loss;
}

}  // namespace

double mlp_forward(const MlpNetwork& net, std::span<const double> x) {
  Workspace ws(net);
  return forward(net, x, ws);
}

double mlp_loss_and_gradient(const MlpNetwork& net, const Matrix& X, std::span<const double> y, MlpNetwork* grad) {
  Workspace ws(net);
  std::vector<std::size_t> rows(X.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (grad) {
    *grad = net;
    zero(*grad);
  }
  return batch_loss(net, X, y, rows, grad, ws);
}

namespace detail {

MlpParams train_mlp(const ModelSpec& spec, const Matrix& X, std::span<const double> y) {
  const std::size_t n = X.rows();
  MlpParams out;
  out.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : y) var += (v - out.y_mean) * (v - out.y_mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  out.y_scale = sd < kMinScale ? 1.0 : sd;
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = (y[i] - out.y_mean) / out.y_scale;

  // The trailing rows are the validation block, keeping it chronologically
  // after the rows used for gradient steps.
  const double val_fraction = spec.params.at("validation_fraction");
  std::size_t n_val = static_cast<std::size_t>(std::floor(val_fraction * static_cast<double>(n)));
  if (n_val >= n) n_val = 0;
  const std::size_t n_fit = n - n_val;
  std::vector<std::size_t> fit_rows(n_fit);
  std::iota(fit_rows.begin(), fit_rows.end(), std::size_t{0});
  std::vector<std::size_t> val_rows(n_val);
  std::iota(val_rows.begin(), val_rows.end(), n_fit);
  const std::span<const std::size_t> monitor = n_val > 0 ? std::span<const std::size_t>(val_rows) : fit_rows;

  Rng rng = Rng(spec.seed).fork("mlp");
  MlpNetwork net = mlp_init(X.cols(), spec.hidden, rng);
  MlpNetwork grad = net;
  MlpNetwork velocity = net;
  zero(velocity);
  Workspace ws(net);

  const double lr = spec.params.at("learning_rate");
  const double momentum = spec.params.at("momentum");
  const double tol = spec.params.at("tol");
  const std::size_t batch = param_size(spec, "batch_size");
  const std::size_t max_epochs = param_size(spec, "max_epochs");
  const std::size_t patience = param_size(spec, "patience");

  MlpNetwork best = net;
  double best_rmse = std::sqrt(2.0 * batch_loss(net, X, ys, monitor, nullptr, ws));
  std::size_t stale = 0;
  std::size_t epoch = 0;
  std::vector<std::size_t> order = fit_rows;
  while (epoch < max_epochs) {
    ++epoch;
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n_fit; start += batch) {
      const std::size_t len = std::min(batch, n_fit - start);
      zero(grad);
      batch_loss(net, X, ys, {order.data() + start, len}, &grad, ws);
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto step = [&](std::vector<double>& w, std::vector<double>& v, const std::vector<double>& g) {
          for (std::size_t i = 0; i < w.size(); ++i) {
            v[i] = momentum * v[i] - lr * g[i];
            w[i] += v[i];
          }
        };
        step(net.layers[l].weights, velocity.layers[l].weights, grad.layers[l].weights);
        step(net.layers[l].bias, velocity.layers[l].bias, grad.layers[l].bias);
      }
    }
    const double rmse = std::sqrt(2.0 * batch_loss(net, X, ys, monitor, nullptr, ws));
    if (!std::isfinite(rmse)) break;
    if (rmse < best_rmse - tol) {
      best_rmse = rmse;
      best = net;
      stale = 0;
    } else if (++stale >= patience) {
      break;
    }
  }
  out.net = std::move(best);
  out.epochs = epoch;
  return out;
}

}  // namespace detail

}  // namespace covidprep::model
