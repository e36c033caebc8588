#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "harvest/det_sched.hpp"
#include "harvest/stoch_sched.hpp"

namespace harvest {

/// Solver instance file:
///   M,now,load_s,unload_s
///   <values>
///   id,release_s,one_way_s,process_s[,self_transport_s,fill_s,fill_sd_s[,full_y_m]]
///   <one row per request>
struct SolverInstance {
  int robots = 1;
  double now = 0.0;
  double load_time = 5.0;
  double unload_time = 5.0;
  std::vector<std::string> labels;
  DispatchProblem problem;            // release/process as given
  std::vector<FixedRequest> scenario; // only when the stochastic columns are present
  bool has_scenario_columns = false;
};

/// Throws ParseError with the 1-based line number.
SolverInstance parse_instance(std::istream& in);

void print_schedule(std::ostream& out, const SolverInstance& inst, const Schedule& s);
void print_scenario_solution(std::ostream& out, const SolverInstance& inst, const ScenarioSolution& s);
void print_consensus(std::ostream& out, const SolverInstance& inst, const ConsensusPlan& plan, std::size_t scenarios);

}  // namespace harvest
