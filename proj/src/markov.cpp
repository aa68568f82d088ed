#include "pvisit/markov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pvisit/errors.hpp"
#include "pvisit/numeric.hpp"

namespace pvisit {

namespace {

Eigen::RowVectorXd lazy_power_iteration(const Eigen::MatrixXd& P) {
  const Eigen::Index K = P.rows();
  const Eigen::MatrixXd lazy = 0.5 * (P + Eigen::MatrixXd::Identity(K, K));
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(K, 1.0 / static_cast<double>(K));
  for (int it = 0; it < 1'000'000; ++it) {
    Eigen::RowVectorXd next = pi * lazy;
    next /= next.sum();
    const double change = (next - pi).lpNorm<1>();
    pi = std::move(next);
    if (change < 1e-13) return pi;
  }
  throw std::invalid_argument("MarkovBinaryModel: power iteration for the stationary law did not converge");
}

// Joint law of (current state, hits counted so far), advanced one time step
// at a time. Column c holds count c.
class CountDp {
 public:
  CountDp(const MarkovBinaryModel& model, const Eigen::RowVectorXd& start, std::size_t max_len)
      : model_(model), table_(Eigen::MatrixXd::Zero(start.size(), static_cast<Eigen::Index>(max_len + 1))) {
    table_.col(0) = start.transpose();
  }

  std::size_t length() const { return length_; }

  Eigen::VectorXd law() const {
    const auto cols = static_cast<Eigen::Index>(length_ + 1);
    return table_.leftCols(cols).colwise().sum().transpose();
  }

  // Count the current state, then move to the next one.
  void advance() {
    const Eigen::Index K = table_.rows();
    const auto cols = static_cast<Eigen::Index>(length_ + 2);
    for (Eigen::Index s = 0; s < K; ++s) {
      if (!model_.is_hit(static_cast<std::size_t>(s))) continue;
      for (Eigen::Index c = cols - 1; c > 0; --c) table_(s, c) = table_(s, c - 1);
      table_(s, 0) = 0.0;
    }
    const Eigen::MatrixXd& P = model_.transition();
    if (length_ + 1 < 256) {
      Eigen::MatrixXd next = P.transpose() * table_.leftCols(cols);
      table_.leftCols(cols) = next;
    } else {
      Eigen::MatrixXd next(K, cols);
      for (Eigen::Index t = 0; t < K; ++t)
        for (Eigen::Index c = 0; c < cols; ++c) {
          CompensatedSum<double> acc;
          for (Eigen::Index s = 0; s < K; ++s) acc.add(table_(s, c) * P(s, t));
          next(t, c) = acc.value();
        }
      table_.leftCols(cols) = next;
    }
    ++length_;
  }

 private:
  const MarkovBinaryModel& model_;
  Eigen::MatrixXd table_;
  std::size_t length_ = 0;
};

Pmf law_to_pmf(const Eigen::VectorXd& law) {
  const double mass = law.sum();
  // Roundoff can push the total a hair above 1.
  return Pmf(0, law, std::min(1.0, mass), 1e-10);
}

Pmf count_distribution_unchecked(const MarkovBinaryModel& model, std::size_t N) {
  CountDp dp(model, model.stationary(), N);
  while (dp.length() < N) dp.advance();
  return law_to_pmf(dp.law());
}

}  // namespace

MarkovBinaryModel::MarkovBinaryModel(Eigen::MatrixXd transition, std::vector<std::size_t> hit,
                                     std::optional<Eigen::RowVectorXd> stationary)
    : transition_(std::move(transition)), hit_(std::move(hit)) {
  const Eigen::Index K = transition_.rows();
  if (K < 1 || transition_.cols() != K) throw std::invalid_argument("MarkovBinaryModel: transition must be square");
  for (Eigen::Index s = 0; s < K; ++s) {
    for (Eigen::Index t = 0; t < K; ++t)
      if (!std::isfinite(transition_(s, t)) || transition_(s, t) < 0.0)
        throw std::invalid_argument("MarkovBinaryModel: negative or non-finite transition entry");
    if (std::abs(transition_.row(s).sum() - 1.0) > 1e-12)
      throw std::invalid_argument("MarkovBinaryModel: row " + std::to_string(s) + " does not sum to 1");
  }
  std::sort(hit_.begin(), hit_.end());
  hit_.erase(std::unique(hit_.begin(), hit_.end()), hit_.end());
  indicator_ = Eigen::VectorXd::Zero(K);
  for (auto s : hit_) {
    if (s >= static_cast<std::size_t>(K)) throw std::invalid_argument("MarkovBinaryModel: hit state out of range");
    indicator_(static_cast<Eigen::Index>(s)) = 1.0;
  }
  stationary_ = stationary ? *stationary : lazy_power_iteration(transition_);
  if (stationary_.size() != K) throw std::invalid_argument("MarkovBinaryModel: stationary vector has wrong size");
  if ((stationary_.array() < 0.0).any() || std::abs(stationary_.sum() - 1.0) > 1e-10)
    throw std::invalid_argument("MarkovBinaryModel: stationary vector is not a probability vector");
  if ((stationary_ * transition_ - stationary_).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("MarkovBinaryModel: stationary vector is not invariant (pi P != pi)");
}

MarkovBinaryModel MarkovBinaryModel::iid(const Eigen::RowVectorXd& row, std::vector<std::size_t> hit) {
  Eigen::MatrixXd P = row.replicate(row.size(), 1);
  return MarkovBinaryModel(std::move(P), std::move(hit), row);
}

double MarkovBinaryModel::eps() const { return stationary_.dot(indicator_.transpose()); }

std::vector<Eigen::VectorXd> count_laws_by_length(const MarkovBinaryModel& model, const Eigen::RowVectorXd& start,
                                                  std::size_t max_len) {
  if (start.size() != static_cast<Eigen::Index>(model.states()))
    throw std::invalid_argument("count_laws_by_length: start vector has wrong size");
  CountDp dp(model, start, max_len);
  std::vector<Eigen::VectorXd> laws;
  laws.reserve(max_len + 1);
  laws.push_back(dp.law());
  while (dp.length() < max_len) {
    dp.advance();
    laws.push_back(dp.law());
  }
  return laws;
}

Pmf exact_count_distribution(const MarkovBinaryModel& model, std::size_t N) {
  if (N < 1) throw std::invalid_argument("exact_count_distribution: N must be >= 1");
  if (N > kMaxDpLength)
    throw ResourceLimitError("exact_count_distribution: N = " + std::to_string(N) + " exceeds " +
                             std::to_string(kMaxDpLength));
  return count_distribution_unchecked(model, N);
}

Pmf enumerate_count_distribution(const MarkovBinaryModel& model, std::size_t N) {
  if (N < 1) throw std::invalid_argument("enumerate_count_distribution: N must be >= 1");
  const std::size_t K = model.states();
  if (N > kMaxEnumerationLength || std::pow(static_cast<double>(K), static_cast<double>(N)) > kMaxEnumeratedPaths)
    throw ResourceLimitError("enumerate_count_distribution: K^N paths exceed the enumeration guard");
  std::size_t paths = 1;
  for (std::size_t i = 0; i < N; ++i) paths *= K;

  const Eigen::MatrixXd& P = model.transition();
  const Eigen::RowVectorXd& pi = model.stationary();
  std::vector<CompensatedSum<double>> by_count(N + 1);
  std::vector<std::size_t> path(N);
  for (std::size_t id = 0; id < paths; ++id) {
    std::size_t rest = id;
    for (std::size_t i = 0; i < N; ++i) {
      path[i] = rest % K;
      rest /= K;
    }
    double prob = pi(static_cast<Eigen::Index>(path[0]));
    std::size_t hits = model.is_hit(path[0]);
    for (std::size_t i = 1; i < N; ++i) {
      prob *= P(static_cast<Eigen::Index>(path[i - 1]), static_cast<Eigen::Index>(path[i]));
      hits += model.is_hit(path[i]);
    }
    by_count[hits].add(prob);
  }
  Eigen::VectorXd law(static_cast<Eigen::Index>(N + 1));
  for (std::size_t c = 0; c <= N; ++c) law(static_cast<Eigen::Index>(c)) = by_count[c].value();
  return law_to_pmf(law);
}

CorrelationTerms exact_correlation_terms(const MarkovBinaryModel& model, std::size_t N, std::size_t p) {
  if (!(p >= 2 && p < N && N <= 2048))
    throw std::invalid_argument("exact_correlation_terms: need 2 <= p < N <= 2048");
  const Eigen::MatrixXd& P = model.transition();
  const double eps = model.eps();
  CorrelationTerms out;
  if (eps == 0.0) return out;

  // r2: sum over lags of P(X_1 = 1, X_{l+1} = 1).
  Eigen::RowVectorXd joint = model.stationary().cwiseProduct(model.hit_indicator().transpose());
  Eigen::RowVectorXd v = joint;
  for (std::size_t lag = 1; lag < p; ++lag) {
    v = v * P;
    out.r2 += v.dot(model.hit_indicator().transpose());
  }

  // r1: state law at time p + 1 given X_1 = 1, then the window S_{p+1}^{N-j}
  // of length L = N - j - p, against the stationary window law.
  Eigen::RowVectorXd conditioned = joint / eps;
  for (std::size_t step = 0; step < p; ++step) conditioned = conditioned * P;
  const std::size_t max_len = N - p;
  CountDp given_hit(model, conditioned, max_len);
  CountDp stationary(model, model.stationary(), max_len);
  for (;;) {
    const Eigen::VectorXd diff = eps * (given_hit.law() - stationary.law());
    out.r1 = std::max(out.r1, diff.cwiseAbs().maxCoeff());
    if (given_hit.length() == max_len) break;
    given_hit.advance();
    stationary.advance();
  }
  return out;
}

Pmf hybrid_distribution(const MarkovBinaryModel& model, const HybridSpec& spec) {
  if (spec.N < 1 || spec.j > spec.N) throw std::invalid_argument("hybrid_distribution: need 0 <= j <= N, N >= 1");
  if (std::abs(spec.eps - model.eps()) > 1e-12)
    throw std::invalid_argument("hybrid_distribution: Bernoulli rate differs from the model's eps");
  if (spec.N > kMaxDpLength) throw ResourceLimitError("hybrid_distribution: N exceeds the DP guard");
  if (spec.j == 0) return count_distribution_unchecked(model, spec.N);
  const Pmf prefix = binomial_pmf(spec.j, model.eps());
  if (spec.j == spec.N) return prefix;
  return convolve(prefix, count_distribution_unchecked(model, spec.N - spec.j));
}

std::vector<double> telescoping_residuals(const MarkovBinaryModel& model, std::size_t N) {
  if (N < 1 || N > 512) throw std::invalid_argument("telescoping_residuals: need 1 <= N <= 512");
  const double eps = model.eps();
  const std::vector<Eigen::VectorXd> laws = count_laws_by_length(model, model.stationary(), N);
  std::vector<Eigen::VectorXd> binom(N + 1);
  binom[0] = Eigen::VectorXd::Ones(1);
  for (std::size_t j = 1; j <= N; ++j) binom[j] = binomial_pmf(j, eps).probs();

  // hybrid(j)_k = sum_l Binomial(j)_l * law_{N-j}(k - l)
  auto hybrid_at = [&](std::size_t j, std::size_t k) {
    const Eigen::VectorXd& rest = laws[N - j];
    CompensatedSum<double> acc;
    const std::size_t lo = k + 1 > static_cast<std::size_t>(rest.size()) ? k + 1 - rest.size() : 0;
    for (std::size_t l = lo; l <= std::min(j, k); ++l)
      acc.add(binom[j](static_cast<Eigen::Index>(l)) * rest(static_cast<Eigen::Index>(k - l)));
    return acc.value();
  };

  std::vector<double> residuals(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    const double lhs = laws[N](static_cast<Eigen::Index>(k)) - binom[N](static_cast<Eigen::Index>(k));
    CompensatedSum<double> rhs;
    double current = hybrid_at(0, k);
    for (std::size_t j = 0; j < N; ++j) {
      const double next = hybrid_at(j + 1, k);
      rhs.add(current - next);
      current = next;
    }
    residuals[k] = std::abs(lhs - rhs.value());
  }
  return residuals;
}

double telescoping_residual(const MarkovBinaryModel& model, std::size_t N, std::size_t k) {
  if (k > N) throw std::invalid_argument("telescoping_residual: need k <= N");
  return telescoping_residuals(model, N)[k];
}

}  // namespace pvisit
