#include "tasgnn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <unordered_set>

#include "tasgnn/error.hpp"

namespace tasgnn::synthetic {
namespace {

class Builder {
 public:
  Builder(const Config& config) : config_(config), rng_(config.seed) {}

  Network run() {
    assign_roles();
    seed_every_node();
    while (net_.rows.size() < config_.num_edges) step();
    return std::move(net_);
  }

 private:
  using Pool = std::vector<std::size_t>;

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  void assign_roles() {
    const std::size_t n = config_.num_nodes;
    net_.roles.assign(n, Role::kHonest);
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng_);
    std::size_t cursor = 0;
    auto take = [&](std::size_t count, Role role) {
      for (std::size_t i = 0; i < count && cursor < n; ++i) net_.roles[ids[cursor++]] = role;
    };
    const auto frac = [&](double f) { return static_cast<std::size_t>(std::llround(f * static_cast<double>(n))); };
    take(config_.founders, Role::kFounder);
    take(frac(config_.fraudster_fraction), Role::kFraudster);
    take(frac(config_.accomplice_fraction), Role::kAccomplice);
    take(frac(config_.newcomer_fraction), Role::kNewcomer);
    take(frac(config_.troll_fraction), Role::kTroll);

    // Heavy-tailed activity; founders are the platform's power users.
    activity_.resize(n);
    std::gamma_distribution<double> heavy(0.6, 1.0);
    for (std::size_t v = 0; v < n; ++v) {
      double a = 0.05 + heavy(rng_);
      switch (net_.roles[v]) {
        case Role::kFounder: a = 25.0 + 10.0 * uniform(); break;
        case Role::kNewcomer: a *= 0.25; break;
        case Role::kFraudster: a *= 0.8; break;
        default: break;
      }
      activity_[v] = a;
      by_role_[static_cast<int>(net_.roles[v])].push_back(v);
    }
    honest_ = by_role_[static_cast<int>(Role::kHonest)];
    honest_.insert(honest_.end(), by_role_[static_cast<int>(Role::kFounder)].begin(),
                   by_role_[static_cast<int>(Role::kFounder)].end());
    std::sort(honest_.begin(), honest_.end());
    market_ = honest_;
    market_.insert(market_.end(), by_role_[static_cast<int>(Role::kNewcomer)].begin(),
                   by_role_[static_cast<int>(Role::kNewcomer)].end());
    std::sort(market_.begin(), market_.end());
    ring_ = pool(Role::kFraudster);
    ring_.insert(ring_.end(), pool(Role::kAccomplice).begin(), pool(Role::kAccomplice).end());
    std::sort(ring_.begin(), ring_.end());
    for (Role r : {Role::kHonest, Role::kFraudster, Role::kAccomplice, Role::kTroll})
      if (pool(r).empty())
        fail(ErrorCategory::kConfig, "synthetic network has no " + std::string(role_name(r)) + " nodes");
  }

  const Pool& pool(Role r) const { return by_role_[static_cast<int>(r)]; }

  std::size_t pick(const Pool& p, bool weighted = true) {
    if (!weighted) return p[std::uniform_int_distribution<std::size_t>(0, p.size() - 1)(rng_)];
    // Rejection sampling against the pool's activity.
    double max_a = 0.0;
    for (std::size_t v : p) max_a = std::max(max_a, activity_[v]);
    for (;;) {
      const std::size_t v = p[std::uniform_int_distribution<std::size_t>(0, p.size() - 1)(rng_)];
      if (uniform() * max_a <= activity_[v]) return v;
    }
  }

  bool add(std::size_t s, std::size_t t, int rating) {
    if (s == t || rating == 0 || net_.rows.size() >= config_.num_edges) return false;
    if (!pairs_.insert(s * config_.num_nodes + t).second) return false;
    clock_ += 1 + static_cast<std::int64_t>(between(0, 3600));
    net_.rows.push_back({static_cast<std::int64_t>(s + 1), static_cast<std::int64_t>(t + 1),
                         std::clamp(rating, -10, 10), clock_});
    return true;
  }

  int honest_rating() {
    const double u = uniform();
    if (u < 0.55) return 1;
    if (u < 0.85) return between(2, 4);
    return between(5, 10);
  }

  // Every node gets at least one rating so the node count matches the config.
  void seed_every_node() {
    for (std::size_t v = 0; v < config_.num_nodes; ++v) {
      switch (net_.roles[v]) {
        case Role::kFounder:
        case Role::kHonest:
        case Role::kNewcomer:
          add(pick(honest_), v, net_.roles[v] == Role::kNewcomer ? between(1, 2) : honest_rating());
          break;
        case Role::kFraudster:
          add(pick(pool(Role::kAccomplice), false), v, between(6, 10));
          break;
        case Role::kAccomplice:
          add(pick(pool(Role::kFraudster), false), v, between(5, 10));
          break;
        case Role::kTroll:
          add(v, pick(market_), -between(1, 10));
          break;
      }
    }
  }

  void step() {
    const Config& c = config_;
    double u = uniform();
    const auto take = [&u](double rate) {
      if (u < rate) return true;
      u -= rate;
      return false;
    };
    if (take(c.trade_rate)) {
      // Ordinary trade between honest participants, often rated both ways.
      const std::size_t s = pick(market_);
      const std::size_t t = pick(market_);
      const bool newcomer = net_.roles[t] == Role::kNewcomer || net_.roles[s] == Role::kNewcomer;
      int r = newcomer ? between(1, 2) : honest_rating();
      if (uniform() < c.dispute_rate) r = uniform() < 0.8 ? -between(1, 3) : -between(4, 10);
      if (add(s, t, r) && uniform() < 0.5) add(t, s, r > 0 ? std::max(1, r + between(-1, 1)) : r);
    } else if (take(c.wash_rate)) {
      add(pick(ring_, false), pick(pool(Role::kFraudster), false), between(5, 10));
    } else if (take(c.ring_rate)) {
      add(pick(pool(Role::kFraudster), false), pick(ring_, false), between(5, 10));
    } else if (take(c.scam_rate)) {
      // Many victims notice and answer with distrust; the fraudster retaliates.
      const std::size_t victim = pick(honest_);
      const std::size_t f = pick(pool(Role::kFraudster), false);
      const bool scammed = uniform() < c.scam_detect;
      if (add(victim, f, scammed ? -between(5, 10) : between(1, 3)) && uniform() < 0.6)
        add(f, victim, scammed ? -10 : between(1, 2));
    } else if (take(c.badmouth_rate)) {
      add(pick(ring_, false), pick(honest_), -between(6, 10));
    } else if (take(c.troll_rate)) {
      add(pick(pool(Role::kTroll), false), pick(market_, false), -between(1, 10));
    } else {
      add(pick(market_), pick(pool(Role::kAccomplice), false), between(1, 2));
    }
  }

  Config config_;
  std::mt19937_64 rng_;
  Network net_;
  std::vector<double> activity_;
  Pool by_role_[6];
  Pool honest_, market_, ring_;
  std::unordered_set<std::size_t> pairs_;
  std::int64_t clock_ = 1289192400;
};

}  // namespace

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kFounder: return "founder";
    case Role::kHonest: return "honest";
    case Role::kNewcomer: return "newcomer";
    case Role::kFraudster: return "fraudster";
    case Role::kAccomplice: return "accomplice";
    case Role::kTroll: return "troll";
  }
  return "honest";
}

Network generate(const Config& config) {
  if (config.num_nodes < 50 || config.num_edges < config.num_nodes)
    fail(ErrorCategory::kConfig, "synthetic network needs >= 50 nodes and >= N edges");
  return Builder(config).run();
}

void write_csv(std::ostream& out, const Network& network) {
  for (const auto& r : network.rows)
    out << r.source << ',' << r.target << ',' << r.rating << ',' << r.timestamp << '\n';
}

void save_csv(const std::filesystem::path& path, const Network& network) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  write_csv(out, network);
}

void save_roles(const std::filesystem::path& path, const Network& network) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  out << "id,role\n";
  for (std::size_t i = 0; i < network.roles.size(); ++i) out << i + 1 << ',' << role_name(network.roles[i]) << '\n';
}

}  // namespace tasgnn::synthetic
