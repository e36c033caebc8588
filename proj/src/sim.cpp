#include "harvest/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>

#include "harvest/error.hpp"

namespace harvest {

namespace {

constexpr double kEps = 1e-9;

bool near(Point a, Point b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y) < 1e-9; }

Route route_to(Point from, Point to) {
  Route r = manhattan_route(from, to);
  while (!r.done() && near(r.waypoints[r.next], from)) ++r.next;
  return r;
}

double route_time(Point pos, const Route& route, const SpeedProfile& prof) {
  double t = 0.0;
  Point at = pos;
  for (std::size_t i = route.next; i < route.waypoints.size(); ++i) {
    const Point wp = route.waypoints[i];
    const double d = std::abs(wp.x - at.x) + std::abs(wp.y - at.y);
    const bool headland = std::abs(at.y) < kEps && std::abs(wp.y) < kEps;
    t += d / (headland ? prof.headland_speed : prof.furrow_speed);
    at = wp;
  }
  return t;
}

std::string fmt_modes(const std::vector<PickerState>& ps, const std::vector<RobotState>& rs, FsmVariant v) {
  std::ostringstream os;
  for (const auto& p : ps) os << " picker" << p.id << "=" << mode_name(p.mode, v);
  for (const auto& r : rs) os << " robot" << r.id << "=" << mode_name(r.mode, v);
  return os.str();
}

class Simulation {
 public:
  Simulation(const HarvestSetup& setup, const RunOptions& options)
      : cfg_(setup.sim),
        field_(setup.field),
        dists_(setup.dists),
        unc_(setup.uncertainty),
        sched_(setup.scheduler),
        options_(options),
        variant_(setup.sim.fsm_variant),
        stochastic_(uses_stochastic_requests(setup.scheduler.kind)),
        fr_(setup.scheduler.effective_fr()),
        mean_pick_(setup.dists.pick_time.mean()) {
    policy_ = make_policy(sched_, setup.dists.walk_speed.mean(), mix_seed(cfg_.rng_seed ^ 0xA5A5A5A5ULL));
  }

  HarvestTrace run() {
    init();
    const auto ceiling = static_cast<std::size_t>(std::ceil(cfg_.max_sim_time / cfg_.timestep));
    while (!finished()) {
      if (step_ >= ceiling) {
        throw SimulationFault("step ceiling reached at t=" + std::to_string(now_) + " s (seed " +
                              std::to_string(cfg_.rng_seed) + "):" + fmt_modes(pickers_, robots_, variant_));
      }
      step();
    }
    trace_.steps = step_;
    trace_.replans = policy_->replans();
    const double left = trace_.picked_mass - trace_.delivered_mass - partial_mass_;
    if (std::abs(left) > 1e-6 * std::max(1.0, trace_.picked_mass)) {
      throw SimulationFault("mass not conserved: " + std::to_string(left) + " g unaccounted");
    }
    return std::move(trace_);
  }

 private:
  struct PickerBook {
    Rng tray_rng;
    Rng noise_rng;
    Rng bias_rng;
    int tray_id = -1;
    double tray_start = 0.0;
    double tray_end = -1.0;
    double bias = 0.0;
    int request = -1;
    int robot = -1;
    int open_tray = -1;  // index in trace_.trays awaiting resume
    std::deque<std::pair<double, double>> samples;
  };

  struct Request {
    LiveRequest live;
    int robot = -1;
    double expected_full = 0.0;
  };

  struct QueueEntry {
    bool robot;
    int id;
  };

  // ---- setup -------------------------------------------------------------

  void init() {
    const int q = cfg_.crew_size;
    status_.assign(static_cast<std::size_t>(field_.furrow_count()), FurrowStatus::Unharvested);
    std::vector<Point> crew;
    for (int i = 0; i < q; ++i) crew.push_back({field_.furrow_x(i), 0.0});
    field_.set_active_station(active_station(field_, crew));
    station_ = field_.active_station_position();

    if (options_.record_cart) trace_.cart_logs.resize(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) {
      PickerState p;
      p.id = i;
      p.position = station_;
      p.furrow = i;
      status_[static_cast<std::size_t>(i)] = FurrowStatus::Occupied;
      PickerBook b;
      b.tray_rng = Rng::stream(cfg_.rng_seed, 1000 + static_cast<std::uint64_t>(i));
      b.noise_rng = Rng::stream(cfg_.rng_seed, 2000 + static_cast<std::uint64_t>(i));
      b.bias_rng = Rng::stream(cfg_.rng_seed, 3000 + static_cast<std::uint64_t>(i));
      pickers_.push_back(p);
      books_.push_back(std::move(b));
      start_tray(static_cast<std::size_t>(i));
      picker_event(static_cast<std::size_t>(i), PickerEvent::Begin);
      pickers_.back().route = route_to(station_, {field_.furrow_x(i), 0.0});
    }
    for (int k = 0; k < cfg_.robot_count; ++k) {
      RobotState r;
      r.id = k;
      r.position = station_;
      robots_.push_back(r);
      robot_mass_.push_back(0.0);
      robot_event(static_cast<std::size_t>(k), RobotEvent::Ready);
    }
    robot_freed_ = true;
    settle(false);
    record_cart();
  }

  bool finished() const {
    for (const auto& p : pickers_) {
      if (p.mode != PickerMode::Stop) return false;
    }
    for (const auto& r : robots_) {
      if (r.mode != RobotMode::Stop) return false;
    }
    return queue_.empty();
  }

  // ---- one timestep -----------------------------------------------------

  void step() {
    for (std::size_t i = 0; i < pickers_.size(); ++i) {
      auto& p = pickers_[i];
      if (p.mode == PickerMode::Stop) continue;
      const double before = p.tray_mass;
      p = step_picker(p, cfg_);
      if (p.mode == PickerMode::Pick) trace_.picked_mass += p.tray_mass - before;
    }
    for (auto& r : robots_) {
      if (r.mode != RobotMode::Stop) r = step_robot(r, cfg_);
    }
    ++step_;
    const double prev = now_;
    now_ = static_cast<double>(step_) * cfg_.timestep;

    const bool sample_now = std::floor(now_ / unc_.sample_period + kEps) > std::floor(prev / unc_.sample_period + kEps);
    const bool fresh = generate_requests(sample_now);
    settle(true);
    schedule(fresh);
    settle(false);
    update_station();
    record_cart();
  }

  // ---- trays and requests ----------------------------------------------

  void start_tray(std::size_t i) {
    auto& b = books_[i];
    auto& p = pickers_[i];
    p.draw = sample_tray_params(dists_, b.tray_rng);
    b.bias = draw_fill_bias(unc_, mean_pick_, b.bias_rng);
    b.tray_id = next_tray_++;
    b.tray_start = now_;
    b.request = -1;
    b.robot = -1;
    b.samples.clear();
    p.tray_mass = 0.0;
    p.served_flag = false;
    p.reject_flag = false;
  }

  void finish_tray(std::size_t i, int served_by) {
    auto& b = books_[i];
    if (b.open_tray < 0) throw SimulationFault("resume without a full tray");
    auto& t = trace_.trays[static_cast<std::size_t>(b.open_tray)];
    t.t_resume = now_;
    t.served_by = served_by;
    b.open_tray = -1;
  }

  bool generate_requests(bool sample_now) {
    bool fresh = false;
    for (std::size_t i = 0; i < pickers_.size(); ++i) {
      auto& p = pickers_[i];
      auto& b = books_[i];
      if (p.mode != PickerMode::Pick) continue;
      if (stochastic_ && sample_now) {
        const double noise = b.noise_rng.uniform(-unc_.loc_noise_halfwidth, unc_.loc_noise_halfwidth);
        b.samples.emplace_back(now_, p.position.y + (unc_.loc_noise_halfwidth > 0.0 ? noise : 0.0));
        while (!b.samples.empty() && b.samples.front().first < now_ - unc_.regression_window - kEps) b.samples.pop_front();
      }
      if (!policy_->generates_requests() || b.request >= 0 || p.served_flag || p.reject_flag) continue;
      auto truth = make_perfect_request(p, fr_, cfg_, now_, next_request_);
      if (!truth) continue;
      Gaussian speed{p.draw.pick_speed, 0.0};
      if (stochastic_ && unc_.loc_noise_halfwidth > 0.0) {
        if (b.samples.size() < 3) continue;
        const std::vector<std::pair<double, double>> s(b.samples.begin(), b.samples.end());
        const Gaussian g = estimate_speed_regression(s);
        speed = {-g.mean, g.sd};
      }
      Request r;
      r.live.id = next_request_++;
      r.live.picker_id = p.id;
      r.live.truth = *truth;
      r.live.belief = make_stochastic_request(*truth, p.position, b.bias, speed, unc_);
      r.expected_full = stochastic_ ? r.live.belief.created_at + r.live.belief.fill_time.mean
                                    : truth->created_at + truth->remaining_fill;
      b.request = r.live.id;
      requests_[r.live.id] = r;
      ++trace_.request_count;
      fresh = true;
      if (options_.record_events) {
        TraceEvent e = base_event("picker", p.id, "request", p.position, p.tray_mass);
        e.request_id = r.live.id;
        e.target = truth->full_location;
        trace_.events.push_back(e);
      }
    }
    return fresh;
  }

  void close_request(std::size_t i) {
    auto& b = books_[i];
    if (b.request >= 0) requests_.erase(b.request);
    b.request = -1;
    b.robot = -1;
    pickers_[i].served_flag = false;
  }

  // ---- scheduling -------------------------------------------------------

  double expected_free(std::size_t k) const {
    const auto& r = robots_[k];
    const auto& prof = cfg_.speed_profile;
    auto back = [&](Point from) { return one_way_travel_time(station_, from, field_, prof); };
    auto assigned = [&]() -> const Request* {
      if (!r.assigned_request) return nullptr;
      auto it = requests_.find(*r.assigned_request);
      return it == requests_.end() ? nullptr : &it->second;
    };
    const double standoff = variant_ == FsmVariant::Extended ? cfg_.robot_standoff / prof.furrow_speed : 0.0;
    switch (r.mode) {
      case RobotMode::Available:
      case RobotMode::Start:
      case RobotMode::Stop: return 0.0;
      case RobotMode::TravelToPicker:
      case RobotMode::WaitAtPicker: {
        const double arrive = now_ + route_time(r.position, r.route, prof);
        const Request* q = assigned();
        const double full = q ? q->expected_full : arrive;
        const Point loc = q ? q->live.truth.full_location : r.position;
        return std::max(0.0, std::max(arrive, full) + standoff + cfg_.load_time + back(loc) + cfg_.unload_time - now_);
      }
      case RobotMode::DriveToFullTray: {
        const Point end = r.route.done() ? r.position : r.route.target();
        return route_time(r.position, r.route, prof) + cfg_.load_time + back(end) + cfg_.unload_time;
      }
      case RobotMode::ExchangeTrays:
        return std::max(0.0, cfg_.load_time - r.elapsed) + back(r.position) + cfg_.unload_time;
      case RobotMode::TransportFullTray: return route_time(r.position, r.route, prof) + cfg_.unload_time;
      case RobotMode::IdleInQueue: {
        double ahead = 0.0;
        for (const auto& e : queue_) {
          if (e.robot && e.id == r.id) break;
          ahead += cfg_.unload_time;
        }
        return ahead + std::max(0.0, cfg_.unload_time - r.elapsed);
      }
      case RobotMode::EmptyTrayBack: return route_time(r.position, r.route, prof);
    }
    return 0.0;
  }

  PlanningContext context() const {
    PlanningContext ctx;
    ctx.now = now_;
    ctx.field = &field_;
    ctx.station = station_;
    ctx.cfg = &cfg_;
    for (const auto& [id, q] : requests_) {
      if (q.robot < 0) ctx.requests.push_back(q.live);
    }
    for (std::size_t k = 0; k < robots_.size(); ++k) {
      const auto& r = robots_[k];
      if (r.mode == RobotMode::Stop) continue;
      ctx.robots.push_back({r.id, r.mode == RobotMode::Available, expected_free(k)});
    }
    return ctx;
  }

  void schedule(bool fresh) {
    const bool any_available =
        std::any_of(robots_.begin(), robots_.end(), [](const RobotState& r) { return r.mode == RobotMode::Available; });
    bool pending = false;
    for (const auto& [id, q] : requests_) pending = pending || q.robot < 0;
    if (pending && any_available && (fresh || robot_freed_)) {
      policy_->replan(context());
      robot_freed_ = false;
    }
    if (pending && any_available) {
      for (const auto& d : policy_->due(context())) dispatch(static_cast<std::size_t>(d.robot), d.request);
    }
    if (!policy_->rejects_unserved()) return;
    for (std::size_t i = 0; i < pickers_.size(); ++i) {
      auto& p = pickers_[i];
      if (p.mode != PickerMode::Pick || !tray_is_full(p, cfg_) || p.served_flag || p.reject_flag) continue;
      p.reject_flag = true;
      ++trace_.rejection_count;
      if (options_.record_events) {
        TraceEvent e = base_event("scheduler", p.id, "reject", p.position, p.tray_mass);
        e.request_id = books_[i].request;
        trace_.events.push_back(e);
      }
      close_request(i);
    }
  }

  void dispatch(std::size_t k, int request_id) {
    auto it = requests_.find(request_id);
    if (it == requests_.end() || it->second.robot >= 0) throw SimulationFault("dispatch of an unknown or served request");
    auto& r = robots_[k];
    if (r.mode != RobotMode::Available) throw SimulationFault("dispatch of a busy robot");
    auto& q = it->second;
    const auto pi = static_cast<std::size_t>(q.live.picker_id);
    auto& p = pickers_[pi];

    Point target = q.live.truth.full_location;
    if (stochastic_) {
      const auto& bel = q.live.belief;
      target = {bel.current_location.x,
                std::max(0.0, bel.current_location.y - std::max(0.0, bel.speed.mean) * bel.fill_time.mean)};
    }
    if (variant_ == FsmVariant::Extended) {
      target.y = std::max(0.0, std::min(target.y, p.position.y) - cfg_.robot_standoff);
    }
    robot_event(k, RobotEvent::Dispatch);
    r.assigned_request = request_id;
    r.route = route_to(r.position, target);
    q.robot = r.id;
    p.served_flag = true;
    books_[pi].robot = r.id;
    if (options_.record_events) {
      TraceEvent e = base_event("scheduler", r.id, "dispatch", r.position, 0.0);
      e.request_id = request_id;
      e.target = target;
      e.dispatch_time = now_;
      trace_.events.push_back(e);
    }
  }

  // ---- transitions ------------------------------------------------------

  void settle(bool hold_unserved) {
    for (int pass = 0;; ++pass) {
      if (pass > 10000) throw SimulationFault("transition loop did not settle at t=" + std::to_string(now_));
      bool changed = false;
      for (std::size_t i = 0; i < pickers_.size(); ++i) changed |= advance_picker(i, hold_unserved);
      for (std::size_t k = 0; k < robots_.size(); ++k) changed |= advance_robot(k);
      changed |= advance_queue();
      if (!changed) break;
    }
  }

  bool advance_picker(std::size_t i, bool hold_unserved) {
    auto& p = pickers_[i];
    auto& b = books_[i];
    const double fx = field_.furrow_x(p.furrow);
    switch (p.mode) {
      case PickerMode::WalkHeadland:
      case PickerMode::WalkPartlyFullHeadland:
        if (!p.route.done()) return false;
        picker_event(i, PickerEvent::ReachedFurrow);
        p.route = route_to(p.position, {fx, field_.split_line_y()});
        return true;
      case PickerMode::WalkFurrow:
      case PickerMode::WalkPartlyFullFurrow:
        if (!p.route.done()) return false;
        picker_event(i, PickerEvent::ReachedSplitline);
        p.route = route_to(p.position, {fx, 0.0});
        p.heading = -std::numbers::pi / 2.0;
        return true;
      case PickerMode::Pick:
        if (tray_is_full(p, cfg_)) {
          if (hold_unserved && policy_->rejects_unserved() && !p.served_flag && !p.reject_flag) return false;
          on_tray_full(i);
          return true;
        }
        if (p.position.y > kEps) return false;
        on_furrow_end(i);
        return true;
      case PickerMode::WaitForRobot: {
        if (b.robot < 0) return false;
        const auto& r = robots_[static_cast<std::size_t>(b.robot)];
        if (r.mode != RobotMode::ExchangeTrays) return false;
        trace_.trays[static_cast<std::size_t>(b.open_tray)].wait = now_ - b.tray_end;
        picker_event(i, PickerEvent::RobotArrived);
        return true;
      }
      case PickerMode::TransportFullFurrow:
        if (!p.route.done()) return false;
        picker_event(i, PickerEvent::ReachedHeadland);
        p.route = route_to(p.position, station_);
        return true;
      case PickerMode::TransportFullHeadland:
        if (!p.route.done()) return false;
        picker_event(i, PickerEvent::ReachedStation);
        enqueue(false, p.id);
        return true;
      case PickerMode::EmptyTrayBackHeadland:
        if (!p.route.done()) return false;
        picker_event(i, PickerEvent::ReachedFurrow);
        p.route = route_to(p.position, trace_.trays[static_cast<std::size_t>(b.open_tray)].full);
        return true;
      case PickerMode::EmptyTrayBackFurrow:
        if (!p.route.done()) return false;
        picker_event(i, PickerEvent::Resumed);
        finish_tray(i, -1);
        start_tray(i);
        p.route = route_to(p.position, {fx, 0.0});
        p.heading = -std::numbers::pi / 2.0;
        return true;
      default: return false;
    }
  }

  void on_tray_full(std::size_t i) {
    auto& p = pickers_[i];
    auto& b = books_[i];
    TrayTrace t;
    t.tray_id = b.tray_id;
    t.picker_id = p.id;
    t.t_start = b.tray_start;
    t.t_end = now_;
    t.full = p.position;
    t.mass = p.tray_mass;
    t.distance = manhattan_distance(station_, p.position, field_);
    b.open_tray = static_cast<int>(trace_.trays.size());
    b.tray_end = now_;
    trace_.trays.push_back(t);
    picker_event(i, PickerEvent::TrayFull);
    if (p.mode == PickerMode::TransportFullFurrow) p.route = route_to(p.position, {p.position.x, 0.0});
  }

  void on_furrow_end(std::size_t i) {
    auto& p = pickers_[i];
    auto& b = books_[i];
    status_[static_cast<std::size_t>(p.furrow)] = FurrowStatus::Harvested;
    b.samples.clear();
    if (b.robot >= 0) {
      if (variant_ != FsmVariant::Extended) {
        throw SimulationFault("picker " + std::to_string(p.id) + " left its furrow with a robot on the way");
      }
      const auto k = static_cast<std::size_t>(b.robot);
      robot_event(k, RobotEvent::PickerLeftFurrow);
      robots_[k].assigned_request.reset();
      robots_[k].route = route_to(robots_[k].position, station_);
    }
    close_request(i);
    int next = -1;
    try {
      next = next_furrow(p.furrow, status_, field_);
    } catch (const FieldExhausted&) {
      picker_event(i, PickerEvent::FieldDone);
      if (p.tray_mass > 0.0) {
        TrayTrace t;
        t.tray_id = b.tray_id;
        t.picker_id = p.id;
        t.t_start = b.tray_start;
        t.t_end = now_;
        t.t_resume = now_;
        t.full = p.position;
        t.mass = p.tray_mass;
        t.partial = true;
        partial_mass_ += p.tray_mass;
        trace_.trays.push_back(t);
      }
      trace_.duration = std::max(trace_.duration, now_);
      return;
    }
    picker_event(i, PickerEvent::FurrowEnd);
    status_[static_cast<std::size_t>(next)] = FurrowStatus::Occupied;
    p.furrow = next;
    p.route = route_to(p.position, {field_.furrow_x(next), 0.0});
  }

  bool advance_robot(std::size_t k) {
    auto& r = robots_[k];
    switch (r.mode) {
      case RobotMode::Available:
        if (!all_pickers_stopped()) return false;
        robot_event(k, RobotEvent::FieldDone);
        return true;
      case RobotMode::TravelToPicker:
        if (!r.route.done()) return false;
        robot_event(k, RobotEvent::ArrivedAtTarget);
        return true;
      case RobotMode::WaitAtPicker: {
        const auto& p = pickers_[picker_of(r)];
        if (p.mode != PickerMode::WaitForRobot) return false;
        robot_event(k, RobotEvent::TrayFull);
        if (r.mode == RobotMode::DriveToFullTray) r.route = route_to(r.position, p.position);
        return true;
      }
      case RobotMode::DriveToFullTray:
        if (!r.route.done()) return false;
        robot_event(k, RobotEvent::ReachedPicker);
        return true;
      case RobotMode::ExchangeTrays: {
        if (r.elapsed < cfg_.load_time - kEps) return false;
        const std::size_t i = picker_of(r);
        auto& p = pickers_[i];
        robot_mass_[k] = p.tray_mass;
        robot_event(k, RobotEvent::ExchangeDone);
        r.route = route_to(r.position, station_);
        r.assigned_request.reset();
        picker_event(i, PickerEvent::ExchangeDone);
        finish_tray(i, r.id);
        close_request(i);
        start_tray(i);
        p.route = route_to(p.position, {p.position.x, 0.0});
        return true;
      }
      case RobotMode::TransportFullTray:
        if (!r.route.done()) return false;
        robot_event(k, RobotEvent::ReachedStation);
        enqueue(true, r.id);
        return true;
      case RobotMode::EmptyTrayBack:
        if (!r.route.done()) return false;
        robot_event(k, RobotEvent::ReachedStation);
        robot_freed_ = true;
        return true;
      default: return false;
    }
  }

  std::size_t picker_of(const RobotState& r) const {
    if (!r.assigned_request) throw SimulationFault("robot " + std::to_string(r.id) + " has no assigned request");
    auto it = requests_.find(*r.assigned_request);
    if (it == requests_.end()) throw SimulationFault("robot " + std::to_string(r.id) + " serves a closed request");
    return static_cast<std::size_t>(it->second.live.picker_id);
  }

  bool all_pickers_stopped() const {
    return std::all_of(pickers_.begin(), pickers_.end(), [](const PickerState& p) { return p.mode == PickerMode::Stop; });
  }

  void enqueue(bool robot, int id) {
    if (queue_.empty()) queue_started_ = now_;
    queue_.push_back({robot, id});
  }

  bool advance_queue() {
    if (queue_.empty() || now_ - queue_started_ < cfg_.unload_time - kEps) return false;
    const QueueEntry e = queue_.front();
    queue_.pop_front();
    queue_started_ = now_;
    if (e.robot) {
      const auto k = static_cast<std::size_t>(e.id);
      trace_.delivered_mass += robot_mass_[k];
      robot_mass_[k] = 0.0;
      robot_event(k, RobotEvent::Unloaded);
      robots_[k].position = station_;
      robot_freed_ = true;
    } else {
      const auto i = static_cast<std::size_t>(e.id);
      auto& p = pickers_[i];
      trace_.delivered_mass += p.tray_mass;
      p.tray_mass = 0.0;
      picker_event(i, PickerEvent::Delivered);
      p.route = route_to(p.position, {field_.furrow_x(p.furrow), 0.0});
    }
    return true;
  }

  // ---- station, logging -------------------------------------------------

  void update_station() {
    std::vector<Point> crew;
    for (const auto& p : pickers_) {
      if (p.mode != PickerMode::Stop) crew.push_back(p.position);
    }
    if (crew.empty()) return;
    const int s = active_station(field_, crew);
    if (s == field_.active_station_index()) return;
    field_.set_active_station(s);
    station_ = field_.active_station_position();
    for (auto& r : robots_) {
      if (r.mode == RobotMode::Available) r.position = station_;
    }
  }

  void record_cart() {
    if (!options_.record_cart) return;
    for (std::size_t i = 0; i < pickers_.size(); ++i) {
      const auto& p = pickers_[i];
      const auto& b = books_[i];
      CartSample s;
      s.t = now_;
      s.x = p.position.x;
      s.y = p.position.y;
      const bool on_cart = p.mode == PickerMode::Start || p.mode == PickerMode::Pick ||
                           p.mode == PickerMode::WalkHeadland || p.mode == PickerMode::WalkFurrow ||
                           p.mode == PickerMode::WalkPartlyFullHeadland || p.mode == PickerMode::WalkPartlyFullFurrow;
      if (b.tray_end == now_ && b.open_tray >= 0) {
        s.mass = kTrayTare + cfg_.tray_capacity;
      } else if (on_cart) {
        s.mass = kTrayTare + p.tray_mass;
      }
      s.button = b.request >= 0 ? 1 : 0;
      trace_.cart_logs[i].push_back(s);
    }
  }

  TraceEvent base_event(const char* kind, int id, std::string transition, Point pos, double mass) const {
    TraceEvent e;
    e.t = now_;
    e.agent_kind = kind;
    e.agent_id = id;
    e.transition = std::move(transition);
    e.position = pos;
    e.mass = mass;
    return e;
  }

  void picker_event(std::size_t i, PickerEvent ev) {
    auto& p = pickers_[i];
    const PickerMode from = p.mode;
    p = transition_picker(p, ev, variant_);
    if (options_.record_events) {
      TraceEvent e = base_event("picker", p.id, std::string(event_name(ev)), p.position, p.tray_mass);
      e.from = mode_name(from, variant_);
      e.to = mode_name(p.mode, variant_);
      trace_.events.push_back(std::move(e));
    }
  }

  void robot_event(std::size_t k, RobotEvent ev) {
    auto& r = robots_[k];
    const RobotMode from = r.mode;
    r = transition_robot(r, ev, variant_);
    if (options_.record_events) {
      TraceEvent e = base_event("robot", r.id, std::string(event_name(ev)), r.position, robot_mass_[k]);
      e.from = mode_name(from, variant_);
      e.to = mode_name(r.mode, variant_);
      trace_.events.push_back(std::move(e));
    }
  }

  SimConfig cfg_;
  FieldMap field_;
  ParamDistributions dists_;
  UncertaintyParams unc_;
  SchedulerConfig sched_;
  RunOptions options_;
  FsmVariant variant_;
  bool stochastic_;
  double fr_;
  double mean_pick_;
  std::unique_ptr<DispatchPolicy> policy_;

  std::vector<PickerState> pickers_;
  std::vector<PickerBook> books_;
  std::vector<RobotState> robots_;
  std::vector<double> robot_mass_;
  std::vector<FurrowStatus> status_;
  std::map<int, Request> requests_;
  std::deque<QueueEntry> queue_;
  double queue_started_ = 0.0;
  Point station_{};
  double now_ = 0.0;
  std::size_t step_ = 0;
  int next_tray_ = 0;
  int next_request_ = 0;
  bool robot_freed_ = false;
  double partial_mass_ = 0.0;
  HarvestTrace trace_;
};

}  // namespace

std::vector<TrayTrace> HarvestTrace::complete_trays() const {
  std::vector<TrayTrace> out;
  for (const auto& t : trays) {
    if (!t.partial) out.push_back(t);
  }
  std::sort(out.begin(), out.end(), [](const TrayTrace& a, const TrayTrace& b) { return a.tray_id < b.tray_id; });
  return out;
}

void HarvestSetup::validate() const {
  sim.validate();
  dists.validate();
  uncertainty.validate();
  scheduler.validate();
  if (sim.crew_size > field.furrow_count()) throw ConfigError("sim.crew_size exceeds field.furrow_count");
  if (needs_extended_fsm(scheduler.kind) && sim.fsm_variant != FsmVariant::Extended) {
    throw ConfigError("scheduler.kind " + std::string(scheduler_name(scheduler.kind)) +
                      " rejects trays and requires sim.fsm_variant = extended");
  }
  if (scheduler.kind != SchedulerKind::Manual && sim.robot_count < 1) {
    throw ConfigError("sim.robot_count must be >= 1 for scheduler " + std::string(scheduler_name(scheduler.kind)));
  }
}

HarvestTrace run_harvest(const HarvestSetup& setup, const RunOptions& options) {
  setup.validate();
  Simulation sim(setup, options);
  return sim.run();
}

}  // namespace harvest
