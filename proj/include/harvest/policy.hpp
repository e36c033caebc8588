#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "harvest/agents.hpp"
#include "harvest/det_sched.hpp"
#include "harvest/field.hpp"
#include "harvest/request.hpp"
#include "harvest/stoch_sched.hpp"

namespace harvest {

enum class SchedulerKind { Manual, Reactive, DeterministicBab, DeterministicSrptConvert, MsaExact, MsaSrlpt };

std::string_view scheduler_name(SchedulerKind k);
std::optional<SchedulerKind> parse_scheduler(std::string_view name);
bool needs_extended_fsm(SchedulerKind k);
bool uses_stochastic_requests(SchedulerKind k);

struct SchedulerConfig {
  SchedulerKind kind = SchedulerKind::Reactive;
  double fr_request = 1.0;
  std::size_t scenario_count = 50;
  std::size_t bab_cap = kBabCap;
  std::size_t scenario_exact_cap = kScenarioExactCap;
  double grid = 1.0;
  double self_walk_speed = 0.0;  // 0: mean of the walk-speed histogram
  bool parallel_scenarios = true;

  void validate() const;
  /// Fill ratio at which requests are emitted; reactive scheduling always uses 1.
  double effective_fr() const { return kind == SchedulerKind::Reactive ? 1.0 : fr_request; }
};

/// A request the scheduler may still act on (no robot dispatched yet).
struct LiveRequest {
  int id = 0;
  int picker_id = 0;
  DeterministicRequest truth{};
  StochasticRequest belief{};
};

struct RobotView {
  int id = 0;
  bool available = false;
  double availability_delay = 0.0;  // estimated time until free
};

struct PlanningContext {
  double now = 0.0;
  const FieldMap* field = nullptr;
  Point station{};
  const SimConfig* cfg = nullptr;
  std::vector<LiveRequest> requests;
  std::vector<RobotView> robots;  // robots still working, by id
};

struct Dispatch {
  int robot = 0;
  int request = 0;
};

class DispatchPolicy {
 public:
  virtual ~DispatchPolicy() = default;
  virtual bool generates_requests() const { return true; }
  /// Whether a full tray with no robot on the way is sent to self-transport.
  virtual bool rejects_unserved() const { return false; }
  virtual void replan(const PlanningContext& ctx) = 0;
  virtual std::vector<Dispatch> due(const PlanningContext& ctx) = 0;
  virtual std::size_t replans() const { return 0; }
};

/// Every tray is self-transported.
class ManualPolicy final : public DispatchPolicy {
 public:
  bool generates_requests() const override { return false; }
  bool rejects_unserved() const override { return true; }
  void replan(const PlanningContext&) override {}
  std::vector<Dispatch> due(const PlanningContext&) override { return {}; }
};

/// Plans all pending requests as a parallel-machine problem and dispatches
/// each robot when its planned dispatch instant arrives.
class DeterministicPolicy final : public DispatchPolicy {
 public:
  DeterministicPolicy(bool exact, std::size_t cap) : exact_(exact), cap_(cap) {}
  void replan(const PlanningContext& ctx) override;
  std::vector<Dispatch> due(const PlanningContext& ctx) override;
  std::size_t replans() const override { return replans_; }

 private:
  struct Planned {
    int robot;
    double dispatch;
  };
  bool exact_;
  std::size_t cap_;
  std::map<int, Planned> plan_;
  std::size_t replans_ = 0;
};

/// Multiple-scenario consensus planning with rejections.
class MsaPolicy final : public DispatchPolicy {
 public:
  MsaPolicy(const SchedulerConfig& cfg, double walk_speed, std::uint64_t seed);
  bool rejects_unserved() const override { return true; }
  void replan(const PlanningContext& ctx) override;
  std::vector<Dispatch> due(const PlanningContext& ctx) override;
  std::size_t replans() const override { return replans_; }

 private:
  SchedulerConfig cfg_;
  double walk_speed_;
  Rng rng_;
  std::vector<int> ids_;
  ConsensusPlan plan_;
  std::vector<double> expected_release_;
  std::size_t replans_ = 0;
};

std::unique_ptr<DispatchPolicy> make_policy(const SchedulerConfig& cfg, double mean_walk_speed, std::uint64_t seed);

}  // namespace harvest
