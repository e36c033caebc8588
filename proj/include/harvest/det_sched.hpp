#pragma once

#include <cstddef>
#include <vector>

#include "harvest/field.hpp"
#include "harvest/request.hpp"

namespace harvest {

/// Timing of one request served by a robot. Delays are relative, instants absolute.
struct RequestTimeline {
  int request_id = 0;
  double remaining_fill = 0.0;  // until the tray is full
  double one_way = 0.0;         // station to full location
  double release_delay = 0.0;   // max(remaining_fill - one_way, 0)
  double process = 0.0;         // 2 one_way + load + unload
  double dispatch = 0.0;
  double arrival = 0.0;         // dispatch + one_way
  double completion = 0.0;      // dispatch + process
  double wait = 0.0;            // completion - process - release_delay - now
  double arrival_wait = 0.0;    // max(arrival - (now + remaining_fill), 0)
};

RequestTimeline make_timeline(int id, double remaining_fill, double one_way, double load_time, double unload_time);

RequestTimeline derive_timeline(const DeterministicRequest& req, Point station, const FieldMap& field,
                                const SpeedProfile& profile, double load_time, double unload_time, double now);

/// Parallel-machine instance: jobs with release delays and process times,
/// robots busy for `availability[k]` seconds after `now`.
struct DispatchProblem {
  double now = 0.0;
  std::vector<RequestTimeline> jobs;
  std::vector<double> availability;  // per robot, time until free
};

struct Schedule {
  std::vector<std::vector<std::size_t>> sequences;  // per robot, indices into jobs
  std::vector<RequestTimeline> timelines;           // jobs with dispatch fields set, input order
  std::vector<int> robot_of;                        // per job
  double objective = 0.0;                           // sum of completions

  double total_wait() const;
};

/// Non-preemptive list schedule: jobs in `order`, each on the robot that
/// frees first (ties to the lower index), starting at max(release, free).
Schedule list_schedule(const DispatchProblem& problem, const std::vector<std::size_t>& order);

/// Sum of completion times of the SPT list schedule with releases dropped.
double lb_no_release(const DispatchProblem& problem);

struct PreemptiveRelaxation {
  double objective = 0.0;
  std::vector<double> completion;    // absolute, per job
  std::vector<std::size_t> order;    // jobs by completion
};

/// Released job with the shortest remaining work runs on every free robot at
/// once; exact event times.
PreemptiveRelaxation preemptive_srpt(const DispatchProblem& problem);
double lb_preemptive_srpt(const DispatchProblem& problem);

Schedule schedule_srpt_convert(const DispatchProblem& problem);

inline constexpr std::size_t kBabCap = 12;
inline constexpr std::size_t kBruteForceCap = 8;

Schedule schedule_bab(const DispatchProblem& problem, std::size_t cap = kBabCap);
Schedule brute_force_schedule(const DispatchProblem& problem, std::size_t cap = kBruteForceCap);

}  // namespace harvest
