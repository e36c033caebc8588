#pragma once

// Reference computations written independently of the library code paths.
// They enumerate explicitly and are only meant for small instances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "harvest/det_sched.hpp"
#include "harvest/stoch_sched.hpp"

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Calls fn(assignment) for every map of `n` items onto `m` machines.
template <class Fn>
void for_each_assignment(std::size_t n, std::size_t m, Fn&& fn) {
  std::vector<std::size_t> a(n, 0);
  while (true) {
    fn(a);
    std::size_t i = 0;
    while (i < n && ++a[i] == m) a[i++] = 0;
    if (i == n) return;
  }
}

// Minimum over all orders of one robot's job set; `cost` takes a sequence.
template <class Cost>
double best_permutation(std::vector<std::size_t> jobs, Cost&& cost) {
  std::sort(jobs.begin(), jobs.end());
  double best = kInf;
  do {
    best = std::min(best, cost(jobs));
  } while (std::next_permutation(jobs.begin(), jobs.end()));
  return best;
}

// Optimal sum of absolute completion times for Pm | r_j, busy-until | sum C_j.
inline double det_optimum(const harvest::DispatchProblem& p) {
  const std::size_t n = p.jobs.size();
  const std::size_t m = p.availability.size();
  if (n == 0) return 0.0;
  double best = kInf;
  for_each_assignment(n, m, [&](const std::vector<std::size_t>& a) {
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<std::size_t> mine;
      for (std::size_t j = 0; j < n; ++j)
        if (a[j] == k) mine.push_back(j);
      if (mine.empty()) continue;
      total += best_permutation(mine, [&](const std::vector<std::size_t>& seq) {
        double free = p.availability[k];
        double sum = 0.0;
        for (std::size_t j : seq) {
          const double start = std::max(free, p.jobs[j].release_delay);
          free = start + p.jobs[j].process;
          sum += p.now + free;
        }
        return sum;
      });
    }
    best = std::min(best, total);
  });
  return best;
}

// Optimal scenario objective: sum over requests of (collection instant - full
// instant), enumerating served subsets, robot assignments and orders.
inline double scenario_optimum(const harvest::Scenario& scn, const harvest::ScenarioSettings& s, bool allow_rejection) {
  const std::size_t n = scn.requests.size();
  const std::size_t m = s.availability.size();
  double max_fill = 0.0;
  double max_self = 0.0;
  for (const auto& r : scn.requests) {
    max_fill = std::max(max_fill, r.fill);
    max_self = std::max(max_self, r.self_transport);
  }
  const double horizon = s.now + max_fill + max_self;
  auto grid = [&](double t) {
    if (s.grid <= 0.0) return t;
    return s.now + std::ceil((t - s.now) / s.grid - 1e-9) * s.grid;
  };

  double best = kInf;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const bool all = mask == (1u << n) - 1;
    if (!allow_rejection && !all) continue;
    std::vector<std::size_t> served;
    double rejected_cost = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (1u << j)) {
        served.push_back(j);
      } else {
        rejected_cost += scn.requests[j].self_transport;
      }
    }
    if (served.empty()) {
      best = std::min(best, rejected_cost);
      continue;
    }
    if (m == 0) continue;
    for_each_assignment(served.size(), m, [&](const std::vector<std::size_t>& a) {
      double total = rejected_cost;
      for (std::size_t k = 0; k < m && total < kInf; ++k) {
        std::vector<std::size_t> mine;
        for (std::size_t i = 0; i < served.size(); ++i)
          if (a[i] == k) mine.push_back(served[i]);
        if (mine.empty()) continue;
        total += best_permutation(mine, [&](const std::vector<std::size_t>& seq) {
          double free = s.now + s.availability[k];
          double sum = 0.0;
          for (std::size_t j : seq) {
            const auto& r = scn.requests[j];
            const double release = s.now + std::max(r.fill - r.one_way, 0.0);
            const double dispatch = grid(std::max(free, release));
            const double done = dispatch + r.one_way + s.load_time;
            if (allow_rejection && done > horizon + 1e-9) return kInf;
            free = dispatch + 2.0 * r.one_way + s.load_time + s.unload_time;
            sum += done - (s.now + r.fill);
          }
          return sum;
        });
      }
      best = std::min(best, total);
    });
  }
  return best;
}

struct Ols {
  double slope = 0.0;
  double se = 0.0;
};

// Textbook least squares of y on t.
inline Ols ols(std::span<const std::pair<double, double>> pts) {
  const double n = static_cast<double>(pts.size());
  double st = 0.0, sy = 0.0;
  for (const auto& [t, y] : pts) {
    st += t;
    sy += y;
  }
  const double tm = st / n, ym = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [t, y] : pts) {
    sxx += (t - tm) * (t - tm);
    sxy += (t - tm) * (y - ym);
  }
  const double b = sxy / sxx;
  const double a = ym - b * tm;
  double sse = 0.0;
  for (const auto& [t, y] : pts) sse += (y - a - b * t) * (y - a - b * t);
  return {b, std::sqrt(sse / ((n - 2.0) * sxx))};
}

inline double sample_sd(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Integer-valued random parallel-machine instance.
inline harvest::DispatchProblem random_problem(std::mt19937_64& gen, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<int> fill(0, 300);
  std::uniform_int_distribution<int> way(5, 90);
  std::uniform_int_distribution<int> busy(0, 60);
  harvest::DispatchProblem p;
  for (std::size_t j = 0; j < n; ++j) {
    p.jobs.push_back(harvest::make_timeline(static_cast<int>(j), fill(gen), way(gen), 5.0, 5.0));
  }
  for (std::size_t k = 0; k < m; ++k) p.availability.push_back(k == 0 ? 0.0 : busy(gen));
  return p;
}

// Integer-valued random scenario; self-transport is sometimes cheaper than a robot.
inline harvest::Scenario random_scenario(std::mt19937_64& gen, std::size_t n) {
  std::uniform_int_distribution<int> fill(0, 120);
  std::uniform_int_distribution<int> way(5, 60);
  std::uniform_int_distribution<int> self(20, 200);
  harvest::Scenario scn;
  for (std::size_t j = 0; j < n; ++j) {
    scn.requests.push_back({static_cast<int>(j), static_cast<double>(fill(gen)), static_cast<double>(way(gen)),
                            static_cast<double>(self(gen)), 30.0});
  }
  return scn;
}

}  // namespace oracle
