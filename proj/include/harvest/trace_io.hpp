#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"

#include "harvest/metrics.hpp"
#include "harvest/sim.hpp"

namespace harvest {

/// tray_id,picker_id,t_start,t_end,t_resume,x_full,y_full,served_by
void write_trays_csv(std::ostream& out, const HarvestTrace& trace);

/// One JSON object per line: t, agent_kind, agent_id, transition, x, y, W.
void write_events_jsonl(std::ostream& out, const HarvestTrace& trace);

void write_tray_metrics_csv(std::ostream& out, std::uint64_t seed, std::span<const TrayRecord> records, bool header);

void write_cart_log_csv(std::ostream& out, std::span<const CartLogRow> rows);

nlohmann::json metrics_json(const std::string& digest, const MonteCarloResult& result);

}  // namespace harvest
