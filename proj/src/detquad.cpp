#include "casimir/detquad.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <string>
#include <thread>

#include "casimir/errors.hpp"
#include "casimir/simd.hpp"

namespace casimir {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("quadrature: rel_tol must be > 0");
  if (nodes_per_panel < 4) throw DomainError("quadrature: nodes_per_panel must be >= 4");
  if (!(u_max > 0.0)) throw DomainError("quadrature: u_max must be > 0");
  if (max_refinements < 0) throw DomainError("quadrature: max_refinements must be >= 0");
  if (workers < 1) throw DomainError("quadrature: workers must be >= 1");
}

double logdet_one_minus(const KernelMatrix& k) { return logdet_one_minus(k.data(), k.dim()); }

double logdet_one_minus(std::span<const double> k, int dim) {
  if (dim < 1 || k.size() != static_cast<std::size_t>(dim) * dim) {
    throw DomainError("logdet_one_minus: kernel storage does not match its dimension");
  }
  // Cholesky of S = 1 - K, row by row. With t_i = K_ii + sum_j L_ij^2 the
  // pivot is 1 - t_i, and log1p(-t_i) keeps small kernels exact.
  const auto n = static_cast<std::size_t>(dim);
  std::vector<double> l(n * n, 0.0);
  double logdet = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double* li = l.data() + i * n;
    for (std::size_t j = 0; j < i; ++j) {
      const double* lj = l.data() + j * n;
      const double s = -k[i * n + j] - simd::dot({li, j}, {lj, j});
      li[j] = s / lj[j];
    }
    const double t = k[i * n + i] + simd::dot({li, i}, {li, i});
    const double pivot = 1.0 - t;
    if (!(pivot > 0.0) || !std::isfinite(t)) {
      throw ContractionError("logdet_one_minus: kernel not a contraction (pivot " +
                                 std::to_string(pivot) + " at row " + std::to_string(i) + ")",
                             static_cast<int>(i), pivot);
    }
    li[i] = std::sqrt(pivot);
    logdet += std::log1p(-t);
  }
  return logdet;
}

GaussLegendreRule gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[order - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

namespace {

struct Panel {
  double lo;
  double hi;
  int depth;
  std::vector<double> whole;  // one GL rule over [lo, hi]
  std::vector<double> left;   // GL over [lo, mid]
  std::vector<double> right;  // GL over [mid, hi]
  double err = 0.0;
};

// Evaluates f at every beta, components contiguous per node.
std::vector<double> evaluate_nodes(const ComponentIntegrand& f, int components,
                                   const std::vector<double>& betas, int workers) {
  std::vector<double> out(betas.size() * components);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      f(betas[i], std::span<double>(out.data() + i * components, components));
    }
  };
  const auto count = betas.size();
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (threads <= 1) {
    run(0, count);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(count, t * chunk), end = std::min(count, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          run(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

class Integrator {
public:
  Integrator(const ComponentIntegrand& f, int components, double scale, const QuadratureSpec& q)
      : f_(f), components_(components), scale_(scale), q_(q), rule_(gauss_legendre(q.nodes_per_panel)) {}

  // Fills whole (if empty), left, right and err for each panel in one batch.
  void complete(const std::vector<Panel*>& panels) {
    std::vector<std::pair<double, double>> iv;
    for (const Panel* p : panels) {
      const double mid = 0.5 * (p->lo + p->hi);
      if (p->whole.empty()) iv.emplace_back(p->lo, p->hi);
      iv.emplace_back(p->lo, mid);
      iv.emplace_back(mid, p->hi);
    }
    auto sums = integrate(iv);
    std::size_t at = 0;
    for (Panel* p : panels) {
      if (p->whole.empty()) p->whole = std::move(sums[at++]);
      p->left = std::move(sums[at++]);
      p->right = std::move(sums[at++]);
      p->err = 0.0;
      for (int c = 0; c < components_; ++c) {
        p->err += std::fabs(p->whole[c] - (p->left[c] + p->right[c]));
      }
    }
  }

private:
  // s^2 u f(s u) integrated over each [lo, hi] with one GL rule.
  std::vector<std::vector<double>> integrate(const std::vector<std::pair<double, double>>& intervals) {
    const std::size_t order = rule_.nodes.size();
    std::vector<double> betas;
    betas.reserve(intervals.size() * order);
    for (const auto& [lo, hi] : intervals) {
      const double mid = 0.5 * (lo + hi), rad = 0.5 * (hi - lo);
      for (double z : rule_.nodes) betas.push_back(scale_ * (mid + rad * z));
    }
    const auto values = evaluate_nodes(f_, components_, betas, q_.workers);
    std::vector<std::vector<double>> sums(intervals.size(), std::vector<double>(components_, 0.0));
    for (std::size_t iv = 0; iv < intervals.size(); ++iv) {
      const double rad = 0.5 * (intervals[iv].second - intervals[iv].first);
      for (std::size_t k = 0; k < order; ++k) {
        const std::size_t node = iv * order + k;
        const double beta = betas[node];
        const double* v = values.data() + node * components_;
        for (int c = 0; c < components_; ++c) {
          if (!std::isfinite(v[c])) {
            throw DomainError("energy_integral: integrand not finite at beta = " +
                              std::to_string(beta));
          }
          sums[iv][c] += rule_.weights[k] * rad * scale_ * beta * v[c];
        }
      }
    }
    return sums;
  }

  const ComponentIntegrand& f_;
  int components_;
  double scale_;
  const QuadratureSpec& q_;
  GaussLegendreRule rule_;
};

}  // namespace

std::vector<IntegralResult> energy_integral_multi(const ComponentIntegrand& f, int components,
                                                  double beta_scale, const QuadratureSpec& q) {
  q.validate();
  if (components < 1) throw DomainError("energy_integral: need at least one component");
  if (!(beta_scale > 0.0) || !std::isfinite(beta_scale)) {
    throw DomainError("energy_integral: beta scale must be positive and finite");
  }
  Integrator integrator(f, components, beta_scale, q);

  // Panels are kept sorted by position.
  std::vector<Panel> panels;
  panels.push_back({0.0, 0.5 * q.u_max, 0, {}, {}, {}, 0.0});
  panels.push_back({0.5 * q.u_max, q.u_max, 0, {}, {}, {}, 0.0});
  {
    std::vector<Panel*> fresh{&panels[0], &panels[1]};
    integrator.complete(fresh);
  }

  const double tail_factor = std::exp(-0.5 * q.u_max);
  std::vector<IntegralResult> results(static_cast<std::size_t>(components));
  for (;;) {
    std::vector<double> total(components, 0.0), err(components, 0.0);
    double err_sum = 0.0;
    for (const Panel& p : panels) {
      for (int c = 0; c < components; ++c) {
        const double h = p.left[c] + p.right[c];
        total[c] += h;
        err[c] += std::fabs(p.whole[c] - h);
      }
      err_sum += p.err;
    }
    double magnitude = 0.0, tail_sum = 0.0;
    std::vector<double> tail(components);
    for (int c = 0; c < components; ++c) {
      magnitude += std::fabs(total[c]);
      tail[c] = std::fabs(panels.back().left[c] + panels.back().right[c]) * tail_factor;
      tail_sum += tail[c];
    }
    const double budget = q.rel_tol * magnitude;
    const bool converged = err_sum + tail_sum <= budget;

    std::vector<std::size_t> refine;
    if (!converged) {
      for (std::size_t i = 0; i < panels.size(); ++i) {
        const Panel& p = panels[i];
        if (p.depth < q.max_refinements && p.err > budget * (p.hi - p.lo) / q.u_max) refine.push_back(i);
      }
    }
    if (converged || refine.empty()) {
      for (int c = 0; c < components; ++c) {
        results[c].value = total[c];
        results[c].abs_error_estimate = err[c] + tail[c];
        results[c].panels_used = static_cast<int>(panels.size());
        results[c].converged = converged;
      }
      return results;
    }

    std::vector<Panel> next;
    next.reserve(panels.size() + refine.size());
    std::vector<std::size_t> children;
    std::size_t r = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      Panel& p = panels[i];
      if (r < refine.size() && refine[r] == i) {
        ++r;
        const double mid = 0.5 * (p.lo + p.hi);
        children.push_back(next.size());
        next.push_back({p.lo, mid, p.depth + 1, std::move(p.left), {}, {}, 0.0});
        children.push_back(next.size());
        next.push_back({mid, p.hi, p.depth + 1, std::move(p.right), {}, {}, 0.0});
      } else {
        next.push_back(std::move(p));
      }
    }
    panels = std::move(next);
    std::vector<Panel*> fresh;
    for (std::size_t idx : children) fresh.push_back(&panels[idx]);
    integrator.complete(fresh);
  }
}

IntegralResult energy_integral(const std::function<double(double)>& f, double beta_scale,
                               const QuadratureSpec& q) {
  const ComponentIntegrand wrapped = [&f](double beta, std::span<double> out) { out[0] = f(beta); };
  return energy_integral_multi(wrapped, 1, beta_scale, q).front();
}

}  // namespace casimir
