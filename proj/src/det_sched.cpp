#include "harvest/det_sched.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <string>

#include "harvest/error.hpp"

namespace harvest {

namespace {

constexpr double kEps = 1e-9;

void check_problem(const DispatchProblem& p) {
  if (p.availability.empty()) throw ConfigError("scheduling needs at least one robot");
  for (double a : p.availability) {
    if (a < 0.0) throw ConfigError("robot availability delay must be >= 0");
  }
}

void fill_dispatch(RequestTimeline& t, double now, double start) {
  t.dispatch = start;
  t.arrival = start + t.one_way;
  t.completion = start + t.process;
  t.wait = t.completion - t.process - t.release_delay - now;
  t.arrival_wait = std::max(t.arrival - (now + t.remaining_fill), 0.0);
}

std::size_t earliest(const std::vector<double>& free) {
  return static_cast<std::size_t>(std::min_element(free.begin(), free.end()) - free.begin());
}

// SPT on machines that become free at `free` (relative times), releases ignored.
double spt_relative(std::vector<double> process, std::vector<double> free) {
  std::sort(process.begin(), process.end());
  double total = 0.0;
  for (double p : process) {
    const auto k = earliest(free);
    free[k] += p;
    total += free[k];
  }
  return total;
}

struct Job {
  double release;
  double process;
};

// Preemptive relaxation on relative times; robot k joins the pool at free[k].
PreemptiveRelaxation srpt_relative(const std::vector<Job>& jobs, std::vector<double> free) {
  const std::size_t n = jobs.size();
  PreemptiveRelaxation out;
  out.completion.assign(n, 0.0);
  if (n == 0) return out;
  std::sort(free.begin(), free.end());
  std::vector<double> left(n);
  for (std::size_t i = 0; i < n; ++i) left[i] = jobs[i].process;
  std::vector<bool> done(n, false);
  std::size_t remaining = n;
  double t = 0.0;
  while (remaining > 0) {
    std::size_t rate = 0;
    while (rate < free.size() && free[rate] <= t + kEps) ++rate;
    // Next event that can change the rate or the job set.
    double next_event = std::numeric_limits<double>::infinity();
    if (rate < free.size()) next_event = free[rate];
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (jobs[i].release <= t + kEps) {
        if (pick == n || left[i] < left[pick] - kEps) pick = i;
      } else {
        next_event = std::min(next_event, jobs[i].release);
      }
    }
    if (pick == n || rate == 0) {
      t = next_event;
      continue;
    }
    const double finish = t + left[pick] / static_cast<double>(rate);
    if (finish <= next_event + kEps) {
      t = finish;
      left[pick] = 0.0;
      done[pick] = true;
      --remaining;
      out.completion[pick] = t;
      out.order.push_back(pick);
    } else {
      left[pick] -= (next_event - t) * static_cast<double>(rate);
      t = next_event;
    }
  }
  out.objective = std::accumulate(out.completion.begin(), out.completion.end(), 0.0);
  return out;
}

std::vector<Job> relative_jobs(const DispatchProblem& p) {
  std::vector<Job> jobs;
  jobs.reserve(p.jobs.size());
  for (const auto& j : p.jobs) jobs.push_back({j.release_delay, j.process});
  return jobs;
}

Schedule finish_schedule(const DispatchProblem& p, const std::vector<std::vector<std::size_t>>& seqs) {
  Schedule s;
  s.sequences = seqs;
  s.timelines = p.jobs;
  s.robot_of.assign(p.jobs.size(), -1);
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    double free = p.availability[k];
    for (std::size_t j : seqs[k]) {
      const double start = std::max(p.jobs[j].release_delay, free);
      fill_dispatch(s.timelines[j], p.now, p.now + start);
      free = start + p.jobs[j].process;
      s.robot_of[j] = static_cast<int>(k);
      s.objective += s.timelines[j].completion;
    }
  }
  return s;
}

}  // namespace

RequestTimeline make_timeline(int id, double remaining_fill, double one_way, double load_time, double unload_time) {
  if (remaining_fill < 0.0 || one_way < 0.0) throw ConfigError("request times must be >= 0");
  RequestTimeline t;
  t.request_id = id;
  t.remaining_fill = remaining_fill;
  t.one_way = one_way;
  t.release_delay = std::max(remaining_fill - one_way, 0.0);
  t.process = 2.0 * one_way + load_time + unload_time;
  return t;
}

RequestTimeline derive_timeline(const DeterministicRequest& req, Point station, const FieldMap& field,
                                const SpeedProfile& profile, double load_time, double unload_time, double now) {
  const double u = one_way_travel_time(station, req.full_location, field, profile);
  const double fill = std::max(0.0, req.created_at + req.remaining_fill - now);
  return make_timeline(req.id, fill, u, load_time, unload_time);
}

double Schedule::total_wait() const {
  double w = 0.0;
  for (const auto& t : timelines) w += t.wait;
  return w;
}

Schedule list_schedule(const DispatchProblem& problem, const std::vector<std::size_t>& order) {
  check_problem(problem);
  std::vector<double> free = problem.availability;
  std::vector<std::vector<std::size_t>> seqs(free.size());
  for (std::size_t j : order) {
    const auto k = earliest(free);
    free[k] = std::max(problem.jobs[j].release_delay, free[k]) + problem.jobs[j].process;
    seqs[k].push_back(j);
  }
  return finish_schedule(problem, seqs);
}

double lb_no_release(const DispatchProblem& problem) {
  check_problem(problem);
  std::vector<double> process;
  for (const auto& j : problem.jobs) process.push_back(j.process);
  return spt_relative(process, problem.availability) + problem.now * static_cast<double>(problem.jobs.size());
}

PreemptiveRelaxation preemptive_srpt(const DispatchProblem& problem) {
  check_problem(problem);
  auto r = srpt_relative(relative_jobs(problem), problem.availability);
  for (double& c : r.completion) c += problem.now;
  r.objective += problem.now * static_cast<double>(problem.jobs.size());
  return r;
}

double lb_preemptive_srpt(const DispatchProblem& problem) { return preemptive_srpt(problem).objective; }

Schedule schedule_srpt_convert(const DispatchProblem& problem) {
  check_problem(problem);
  return list_schedule(problem, preemptive_srpt(problem).order);
}

namespace {

struct Node {
  double bound;
  double cost;
  std::uint64_t seq;
  std::uint32_t mask;
  std::vector<double> free;  // sorted ascending
  std::vector<std::size_t> order;
};

struct NodeWorse {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

double node_bound(const std::vector<Job>& jobs, std::uint32_t mask, const std::vector<double>& free) {
  std::vector<Job> rest;
  std::vector<double> process;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!(mask & (1u << i))) {
      rest.push_back(jobs[i]);
      process.push_back(jobs[i].process);
    }
  }
  if (rest.empty()) return 0.0;
  return std::max(spt_relative(process, free), srpt_relative(rest, free).objective);
}

}  // namespace

Schedule schedule_bab(const DispatchProblem& problem, std::size_t cap) {
  check_problem(problem);
  const std::size_t n = problem.jobs.size();
  if (n > cap) {
    throw SizeCapError("branch-and-bound is capped at " + std::to_string(cap) + " requests (got " +
                       std::to_string(n) + "); use srpt-convert");
  }
  if (n == 0) return finish_schedule(problem, std::vector<std::vector<std::size_t>>(problem.availability.size()));

  const auto jobs = relative_jobs(problem);
  const Schedule seed = schedule_srpt_convert(problem);
  double best = seed.objective - problem.now * static_cast<double>(n);
  std::vector<std::size_t> best_order;
  bool improved = false;

  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1u);
  std::map<std::pair<std::uint32_t, std::vector<double>>, double> seen;
  std::priority_queue<Node, std::vector<Node>, NodeWorse> open;
  std::uint64_t seq = 0;
  std::vector<double> root_free = problem.availability;
  std::sort(root_free.begin(), root_free.end());
  open.push({node_bound(jobs, 0, root_free), 0.0, seq++, 0, root_free, {}});

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound >= best - kEps) break;
    if (node.mask == full) {
      best = node.cost;
      best_order = node.order;
      improved = true;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (node.mask & (1u << j)) continue;
      Node child;
      child.mask = node.mask | (1u << j);
      child.free = node.free;
      const double start = std::max(jobs[j].release, child.free.front());
      child.free.front() = start + jobs[j].process;
      std::sort(child.free.begin(), child.free.end());
      child.cost = node.cost + start + jobs[j].process;
      child.bound = child.cost + node_bound(jobs, child.mask, child.free);
      if (child.bound >= best - kEps) continue;
      auto key = std::make_pair(child.mask, child.free);
      auto it = seen.find(key);
      if (it != seen.end() && it->second <= child.cost + kEps) continue;
      seen[key] = child.cost;
      child.order = node.order;
      child.order.push_back(j);
      child.seq = seq++;
      open.push(std::move(child));
    }
  }
  return improved ? list_schedule(problem, best_order) : seed;
}

Schedule brute_force_schedule(const DispatchProblem& problem, std::size_t cap) {
  check_problem(problem);
  const std::size_t n = problem.jobs.size();
  const std::size_t m = problem.availability.size();
  if (n > cap) {
    throw SizeCapError("brute force is capped at " + std::to_string(cap) + " requests (got " + std::to_string(n) + ")");
  }
  // Robots are independent once the assignment is fixed, so each robot's
  // sequence is minimised over all permutations of its own jobs.
  auto best_sequence = [&](std::size_t k, std::vector<std::size_t> jobs, double& cost) {
    std::sort(jobs.begin(), jobs.end());
    std::vector<std::size_t> best_perm = jobs;
    double best = std::numeric_limits<double>::infinity();
    do {
      double free = problem.availability[k];
      double c = 0.0;
      for (std::size_t j : jobs) {
        free = std::max(problem.jobs[j].release_delay, free) + problem.jobs[j].process;
        c += free;
      }
      if (c < best - kEps) {
        best = c;
        best_perm = jobs;
      }
    } while (std::next_permutation(jobs.begin(), jobs.end()));
    cost = jobs.empty() ? 0.0 : best;
    return best_perm;
  };

  std::vector<std::size_t> assign(n, 0);
  std::vector<std::vector<std::size_t>> best_seqs(m);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::vector<std::size_t>> groups(m);
    for (std::size_t j = 0; j < n; ++j) groups[assign[j]].push_back(j);
    double total = 0.0;
    std::vector<std::vector<std::size_t>> seqs(m);
    for (std::size_t k = 0; k < m; ++k) {
      double c = 0.0;
      seqs[k] = best_sequence(k, groups[k], c);
      total += c;
    }
    if (total < best - kEps) {
      best = total;
      best_seqs = seqs;
    }
    std::size_t pos = 0;
    while (pos < n && ++assign[pos] == m) assign[pos++] = 0;
    if (pos == n) break;
  }
  return finish_schedule(problem, best_seqs);
}

}  // namespace harvest
