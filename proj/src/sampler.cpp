#include "shockcast/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "shockcast/rng.hpp"

namespace shockcast {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Nesterov dual averaging on log step size (Hoffman & Gelman 2014).
class DualAverage {
 public:
  DualAverage(double eps0, double target)
      : mu_(std::log(10.0 * eps0)), log_eps_(std::log(eps0)), target_(target) {}

  void update(double accept) {
    ++m_;
    double frac = 1.0 / (m_ + t0_);
    h_bar_ = (1.0 - frac) * h_bar_ + frac * (target_ - accept);
    log_eps_ = mu_ - std::sqrt(static_cast<double>(m_)) / gamma_ * h_bar_;
    double w = std::pow(static_cast<double>(m_), -kappa_);
    log_eps_bar_ = w * log_eps_ + (1.0 - w) * log_eps_bar_;
  }

  double epsilon() const { return std::exp(log_eps_); }
  double adapted_epsilon() const { return m_ > 0 ? std::exp(log_eps_bar_) : std::exp(log_eps_); }

 private:
  double mu_;
  double log_eps_;
  double log_eps_bar_ = 0.0;
  double h_bar_ = 0.0;
  double target_;
  int m_ = 0;
  static constexpr double t0_ = 10.0;
  static constexpr double gamma_ = 0.05;
  static constexpr double kappa_ = 0.75;
};

// Online mean/variance for metric adaptation.
class Welford {
 public:
  explicit Welford(int dim) : mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {}

  void add(const Eigen::VectorXd& x) {
    ++n_;
    Eigen::VectorXd d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d.cwiseProduct(x - mean_);
  }

  int count() const { return n_; }
  Eigen::VectorXd variance() const {
    if (n_ < 2) return Eigen::VectorXd::Ones(mean_.size());
    return m2_ / static_cast<double>(n_ - 1);
  }
  void reset() {
    n_ = 0;
    mean_.setZero();
    m2_.setZero();
  }

 private:
  int n_ = 0;
  Eigen::VectorXd mean_, m2_;
};

struct State {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  Eigen::VectorXd grad;
  double lp = 0.0;
};

class ChainSampler {
 public:
  ChainSampler(const LogDensity& model, const SamplerConfig& cfg, std::uint64_t seed)
      : model_(model),
        cfg_(cfg),
        rng_(seed),
        dim_(model.dim()),
        inv_mass_(Eigen::VectorXd::Ones(model.dim())) {}

  ChainResult run(const Eigen::VectorXd& init) {
    State cur;
    cur.q = init;
    cur.grad.resize(dim_);
    if (!model_.value_and_gradient(cur.q, cur.lp, cur.grad)) {
      throw std::runtime_error("sampler: log posterior is not finite at the initial point");
    }

    ChainResult result;
    result.draws.resize(cfg_.n_sampling, dim_);
    result.lp.resize(cfg_.n_sampling);
    result.stats.reserve(cfg_.n_sampling);

    eps_ = find_initial_step(cur);
    DualAverage da(eps_, cfg_.target_accept);
    Welford welford(dim_);

    // Stan-style windowed warmup: step-size-only buffers around expanding
    // metric windows.
    int init_buf = 75, term_buf = 50, base_win = 25;
    bool adapt_metric = cfg_.n_warmup >= 20;
    if (adapt_metric && init_buf + term_buf + base_win > cfg_.n_warmup) {
      init_buf = static_cast<int>(0.15 * cfg_.n_warmup);
      term_buf = static_cast<int>(0.10 * cfg_.n_warmup);
      base_win = cfg_.n_warmup - init_buf - term_buf;
    }
    int window_end = adapt_metric ? init_buf + base_win : cfg_.n_warmup;
    int window_size = base_win;
    auto next_window = [&](int end, int size) {
      int next_size = 2 * size;
      int next_end = end + next_size;
      if (next_end + term_buf + 2 * next_size > cfg_.n_warmup) {
        next_end = cfg_.n_warmup - term_buf;  // absorb the remainder
      }
      return std::pair<int, int>(next_end, next_size);
    };
    if (adapt_metric && window_end + term_buf + 2 * window_size > cfg_.n_warmup) {
      window_end = cfg_.n_warmup - term_buf;
    }

    int divergent_warmup = 0;
    for (int it = 0; it < cfg_.n_warmup; ++it) {
      IterationStats st = transition(cur);
      if (st.divergent) ++divergent_warmup;
      da.update(st.accept_stat);
      eps_ = da.epsilon();
      bool in_metric_window = adapt_metric && it >= init_buf && it < cfg_.n_warmup - term_buf;
      if (in_metric_window) {
        welford.add(cur.q);
        if (it + 1 == window_end) {
          double n = welford.count();
          Eigen::VectorXd var = welford.variance();
          inv_mass_ = var * (n / (n + 5.0)) + Eigen::VectorXd::Constant(dim_, 1e-3 * (5.0 / (n + 5.0)));
          welford.reset();
          std::tie(window_end, window_size) = next_window(window_end, window_size);
          da = DualAverage(eps_, cfg_.target_accept);  // restart around the new metric
        }
      }
    }
    if (cfg_.n_warmup > 0 && divergent_warmup == cfg_.n_warmup) {
      throw std::runtime_error(
          "sampler: every warmup iteration diverged; the posterior gradient is likely broken "
          "or the initialization is pathological");
    }
    eps_ = da.adapted_epsilon();
    if (!(eps_ > 0.0) || !std::isfinite(eps_)) {
      throw std::runtime_error("sampler: step-size adaptation failed (eps = " +
                               std::to_string(eps_) + ")");
    }
    result.divergent_warmup = divergent_warmup;
    result.step_size = eps_;
    result.inv_mass = inv_mass_;

    for (int it = 0; it < cfg_.n_sampling; ++it) {
      IterationStats st = transition(cur);
      result.draws.row(it) = cur.q.transpose();
      result.lp(it) = cur.lp;
      result.stats.push_back(st);
    }
    return result;
  }

 private:
  double kinetic(const Eigen::VectorXd& p) const {
    return 0.5 * p.cwiseProduct(p).dot(inv_mass_);
  }

  void sample_momentum(Eigen::VectorXd& p) {
    p.resize(dim_);
    for (int i = 0; i < dim_; ++i) {
      p(i) = normal_(rng_) / std::sqrt(inv_mass_(i));
    }
  }

  // One leapfrog step; returns false on a non-finite evaluation.
  bool leapfrog(State& s, double eps) {
    s.p += 0.5 * eps * s.grad;
    s.q += eps * inv_mass_.cwiseProduct(s.p);
    if (!model_.value_and_gradient(s.q, s.lp, s.grad)) return false;
    s.p += 0.5 * eps * s.grad;
    return true;
  }

  // Heuristic doubling/halving until the one-step acceptance crosses 1/2
  // (Hoffman & Gelman, algorithm 4).
  double find_initial_step(const State& origin) {
    State s0 = origin;
    sample_momentum(s0.p);
    double h0 = -s0.lp + kinetic(s0.p);
    auto log_ratio = [&](double e) {
      State s = s0;
      if (!leapfrog(s, e)) return kNegInf;
      return h0 - (-s.lp + kinetic(s.p));
    };
    const double log_half = std::log(0.5);
    double eps = 1.0;
    double lr = log_ratio(eps);
    double dir = lr > log_half ? 1.0 : -1.0;
    for (int i = 0; i < 100; ++i) {
      eps *= std::pow(2.0, dir);
      if (eps > 1e7 || eps < 1e-10) break;
      lr = log_ratio(eps);
      if (dir > 0.0 ? lr <= log_half : lr >= log_half) break;
    }
    return std::clamp(eps, 1e-10, 1e7);
  }

  struct Tree {
    State minus, plus, proposal;
    double log_sum_w = kNegInf;
    double sum_alpha = 0.0;
    int n_alpha = 0;
    int n_leapfrog = 0;
    bool ok = false;
    bool divergent = false;
  };

  bool no_uturn(const State& minus, const State& plus) const {
    Eigen::VectorXd dq = plus.q - minus.q;
    return dq.dot(inv_mass_.cwiseProduct(minus.p)) >= 0.0 &&
           dq.dot(inv_mass_.cwiseProduct(plus.p)) >= 0.0;
  }

  Tree build_tree(int depth, const State& from, double dir, double h0) {
    Tree tree;
    if (depth == 0) {
      State s = from;
      bool finite = leapfrog(s, dir * eps_);
      tree.n_leapfrog = 1;
      double h = finite ? -s.lp + kinetic(s.p) : std::numeric_limits<double>::infinity();
      double dh = h - h0;
      if (!std::isfinite(dh) || dh > cfg_.divergence_threshold) {
        tree.divergent = true;
        tree.ok = false;
        tree.sum_alpha = 0.0;
        tree.n_alpha = 1;
        return tree;
      }
      tree.minus = s;
      tree.plus = s;
      tree.proposal = s;
      tree.log_sum_w = -dh;
      tree.sum_alpha = std::min(1.0, std::exp(-dh));
      tree.n_alpha = 1;
      tree.ok = true;
      return tree;
    }

    Tree first = build_tree(depth - 1, from, dir, h0);
    if (!first.ok) return first;
    Tree second = build_tree(depth - 1, dir > 0 ? first.plus : first.minus, dir, h0);

    tree = Tree{};
    tree.n_leapfrog = first.n_leapfrog + second.n_leapfrog;
    tree.sum_alpha = first.sum_alpha + second.sum_alpha;
    tree.n_alpha = first.n_alpha + second.n_alpha;
    tree.divergent = first.divergent || second.divergent;
    if (!second.ok) {
      tree.ok = false;
      return tree;
    }
    tree.minus = dir > 0 ? first.minus : second.minus;
    tree.plus = dir > 0 ? second.plus : first.plus;
    tree.log_sum_w = log_sum_exp(first.log_sum_w, second.log_sum_w);
    double pick = std::exp(second.log_sum_w - tree.log_sum_w);
    tree.proposal = (unif_(rng_) < pick) ? second.proposal : first.proposal;
    tree.ok = no_uturn(tree.minus, tree.plus);
    return tree;
  }

  IterationStats transition(State& cur) {
    if (!cfg_.nuts) return transition_static(cur);

    sample_momentum(cur.p);
    double h0 = -cur.lp + kinetic(cur.p);

    State minus = cur, plus = cur, proposal = cur;
    double log_sum_w = 0.0;
    double sum_alpha = 0.0;
    int n_alpha = 0, n_leapfrog = 0;
    bool divergent = false;
    int depth = 0;

    while (depth < cfg_.max_tree_depth) {
      double dir = (unif_(rng_) < 0.5) ? -1.0 : 1.0;
      Tree subtree = build_tree(depth, dir > 0 ? plus : minus, dir, h0);
      sum_alpha += subtree.sum_alpha;
      n_alpha += subtree.n_alpha;
      n_leapfrog += subtree.n_leapfrog;
      if (subtree.divergent) divergent = true;
      if (!subtree.ok) break;

      double accept_prob = std::exp(subtree.log_sum_w - log_sum_w);
      if (accept_prob >= 1.0 || unif_(rng_) < accept_prob) {
        proposal = subtree.proposal;
      }
      log_sum_w = log_sum_exp(log_sum_w, subtree.log_sum_w);
      if (dir > 0) {
        plus = subtree.plus;
      } else {
        minus = subtree.minus;
      }
      ++depth;
      if (!no_uturn(minus, plus)) break;
    }

    cur = proposal;
    IterationStats st;
    st.divergent = divergent;
    st.tree_depth = depth;
    st.n_leapfrog = n_leapfrog;
    st.energy = -cur.lp + kinetic(cur.p);
    st.accept_stat = n_alpha > 0 ? sum_alpha / n_alpha : 0.0;
    st.step_size = eps_;
    return st;
  }

  IterationStats transition_static(State& cur) {
    sample_momentum(cur.p);
    double h0 = -cur.lp + kinetic(cur.p);
    State s = cur;
    bool finite = true;
    int steps = std::max(1, cfg_.leapfrog_steps);
    for (int i = 0; i < steps && finite; ++i) finite = leapfrog(s, eps_);
    double h1 = finite ? -s.lp + kinetic(s.p) : std::numeric_limits<double>::infinity();
    double dh = h1 - h0;
    IterationStats st;
    st.tree_depth = 0;
    st.n_leapfrog = steps;
    st.step_size = eps_;
    st.divergent = !std::isfinite(dh) || dh > cfg_.divergence_threshold;
    double alpha = st.divergent ? 0.0 : std::min(1.0, std::exp(-dh));
    st.accept_stat = alpha;
    if (!st.divergent && unif_(rng_) < alpha) cur = s;
    st.energy = -cur.lp + kinetic(cur.p);
    return st;
  }

  const LogDensity& model_;
  const SamplerConfig& cfg_;
  std::mt19937_64 rng_;
  int dim_;
  Eigen::VectorXd inv_mass_;
  double eps_ = 1.0;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

}  // namespace

Eigen::MatrixXd PosteriorDraws::parameter_matrix(int param) const {
  Eigen::MatrixXd out(n_iterations(), n_chains());
  for (int c = 0; c < n_chains(); ++c) out.col(c) = chains[c].draws.col(param);
  return out;
}

double PosteriorDraws::divergence_rate() const {
  long total = 0, divergent = 0;
  for (const auto& chain : chains) {
    for (const auto& st : chain.stats) {
      ++total;
      if (st.divergent) ++divergent;
    }
  }
  return total > 0 ? static_cast<double>(divergent) / total : 0.0;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SHOCKCAST_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

PosteriorDraws run_chains(const LogDensity& model, const SamplerConfig& config,
                          const std::vector<Eigen::VectorXd>& inits) {
  if (config.n_chains < 1 || config.n_warmup < 0 || config.n_sampling < 1) {
    throw std::invalid_argument("run_chains: chain/iteration counts must be positive");
  }
  if (!(config.target_accept > 0.0 && config.target_accept < 1.0)) {
    throw std::invalid_argument("run_chains: target acceptance must lie in (0,1)");
  }
  if (!inits.empty() && static_cast<int>(inits.size()) != config.n_chains) {
    throw std::invalid_argument("run_chains: expected one init per chain");
  }

  const int dim = model.dim();
  std::vector<Eigen::VectorXd> chain_inits(config.n_chains);
  for (int c = 0; c < config.n_chains; ++c) {
    if (!inits.empty()) {
      if (inits[c].size() != dim) throw std::invalid_argument("run_chains: init dimension mismatch");
      if (!inits[c].allFinite()) throw std::invalid_argument("run_chains: init is not finite");
      chain_inits[c] = inits[c];
    } else {
      std::mt19937_64 rng = make_rng(config.seed, 0xA110C000ULL + static_cast<std::uint64_t>(c));
      std::uniform_real_distribution<double> u(-config.init_radius, config.init_radius);
      chain_inits[c].resize(dim);
      for (int i = 0; i < dim; ++i) chain_inits[c](i) = u(rng);
    }
  }

  PosteriorDraws out;
  out.chains.resize(config.n_chains);
  std::vector<std::exception_ptr> errors(config.n_chains);

  auto run_one = [&](int c) {
    try {
      ChainSampler sampler(model, config, stream_seed(config.seed, static_cast<std::uint64_t>(c)));
      out.chains[c] = sampler.run(chain_inits[c]);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  int n_threads = std::min(resolve_threads(config.threads), config.n_chains);
  if (n_threads <= 1) {
    for (int c = 0; c < config.n_chains; ++c) run_one(c);
  } else {
    std::vector<std::thread> workers;
    std::atomic<int> next{0};
    for (int w = 0; w < n_threads; ++w) {
      workers.emplace_back([&]() {
        for (;;) {
          int c = next.fetch_add(1);
          if (c >= config.n_chains) return;
          run_one(c);
        }
      });
    }
    for (auto& t : workers) t.join();
  }
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return out;
}

}  // namespace shockcast
