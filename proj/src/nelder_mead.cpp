#include "catbell/nelder_mead.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace catbell {

namespace {

Eigen::VectorXd project(Eigen::VectorXd x, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

}  // namespace

SimplexResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& start, const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper, const SimplexOptions& options) {
  const Eigen::Index n = start.size();
  std::vector<Eigen::VectorXd> vertex(n + 1);
  std::vector<double> value(n + 1);
  int evaluations = 0;
  const auto eval = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    return f(x);
  };

  vertex[0] = project(start, lower, upper);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd x = vertex[0];
    x(i) += options.initial_scale;
    if (x(i) > upper(i)) x(i) = vertex[0](i) - options.initial_scale;
    vertex[i + 1] = project(x, lower, upper);
  }
  for (Eigen::Index i = 0; i <= n; ++i) value[i] = eval(vertex[i]);

  std::vector<Eigen::Index> order(n + 1);
  bool converged = false;
  while (evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return value[a] < value[b]; });
    const Eigen::Index best = order.front();
    const Eigen::Index worst = order.back();
    const Eigen::Index second_worst = order[n - 1];

    double diameter = 0.0;
    for (Eigen::Index i = 0; i <= n; ++i) {
      diameter = std::max(diameter, (vertex[i] - vertex[best]).cwiseAbs().maxCoeff());
    }
    if (value[worst] - value[best] <= options.f_tolerance && diameter <= options.x_tolerance) {
      converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i != worst) centroid += vertex[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = project(centroid + (centroid - vertex[worst]), lower, upper);
    const double f_reflected = eval(reflected);
    if (f_reflected < value[best]) {
      const Eigen::VectorXd expanded = project(centroid + 2.0 * (centroid - vertex[worst]), lower, upper);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        vertex[worst] = expanded;
        value[worst] = f_expanded;
      } else {
        vertex[worst] = reflected;
        value[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < value[worst];
    const Eigen::VectorXd contracted = outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                                               : Eigen::VectorXd(centroid + 0.5 * (vertex[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < (outside ? f_reflected : value[worst])) {
      vertex[worst] = contracted;
      value[worst] = f_contracted;
      continue;
    }

    // shrink towards the best vertex
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i == best) continue;
      vertex[i] = vertex[best] + 0.5 * (vertex[i] - vertex[best]);
      value[i] = eval(vertex[i]);
    }
  }

  const auto best = std::min_element(value.begin(), value.end()) - value.begin();
  return SimplexResult{vertex[best], value[best], evaluations, converged};
}

Eigen::VectorXd halton_point(int index, int dim) {
  static constexpr std::array<int, 8> kPrimes{2, 3, 5, 7, 11, 13, 17, 19};
  if (dim < 1 || dim > static_cast<int>(kPrimes.size())) throw std::invalid_argument("halton_point: dim out of range");
  Eigen::VectorXd x(dim);
  for (int d = 0; d < dim; ++d) {
    const int base = kPrimes[d];
    double f = 1.0;
    double r = 0.0;
    for (int i = index + 1; i > 0; i /= base) {
      f /= base;
      r += f * (i % base);
    }
    x(d) = r;
  }
  return x;
}

}  // namespace catbell
