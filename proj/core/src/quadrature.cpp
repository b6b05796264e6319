#include "tomo/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "tomo/detail/quadrature_impl.hpp"

namespace tomo::quadrature {

std::vector<double> hermite_seeds(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int i = 1; i < n; ++i) sub[i - 1] = std::sqrt(i / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[i];
  return out;
}

std::vector<double> laguerre_seeds(int n, int alpha) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (int i = 0; i < n; ++i) diag[i] = 2.0 * i + alpha + 1.0;
  for (int i = 1; i < n; ++i) sub[i - 1] = std::sqrt((double)i * (i + alpha));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[i];
  return out;
}

namespace {

template <class Rule, class Build, class Key>
const Rule& cached(std::map<Key, std::unique_ptr<Rule>>& cache, std::mutex& mtx, Key key,
                   Build build) {
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Rule>(build())).first;
  return *it->second;
}

}  // namespace

const HermiteRule<double>& hermite_rule(int n) {
  static std::map<int, std::unique_ptr<HermiteRule<double>>> cache;
  static std::mutex mtx;
  return cached(cache, mtx, n, [n] { return build_hermite_rule<double>(n); });
}

const HermiteRule<detail::f128>& hermite_rule_q(int n) {
  static std::map<int, std::unique_ptr<HermiteRule<detail::f128>>> cache;
  static std::mutex mtx;
  return cached(cache, mtx, n, [n] { return build_hermite_rule<detail::f128>(n); });
}

const LaguerreRule<double>& laguerre_rule(int n, int alpha) {
  static std::map<std::pair<int, int>, std::unique_ptr<LaguerreRule<double>>> cache;
  static std::mutex mtx;
  return cached(cache, mtx, std::make_pair(n, alpha),
                [=] { return build_laguerre_rule<double>(n, alpha); });
}

const LaguerreRule<detail::f128>& laguerre_rule_q(int n, int alpha) {
  static std::map<std::pair<int, int>, std::unique_ptr<LaguerreRule<detail::f128>>> cache;
  static std::mutex mtx;
  return cached(cache, mtx, std::make_pair(n, alpha),
                [=] { return build_laguerre_rule<detail::f128>(n, alpha); });
}

}  // namespace tomo::quadrature
