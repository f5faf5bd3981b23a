#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isched/core.hpp"
#include "isched/rng.hpp"

namespace isched {

// One line of a trace file. Records are key=value pairs, e.g.
//   op=insert id=3 start=5 len=2 weight=3/2
//   op=delete id=3
//   op=query id=3 expect=1
//   op=value expect=7/2
//   op=report
// Unknown keys are rejected; deletes and queries must reference live ids.
struct TraceEvent {
  enum class Op { Insert, Delete, Query, Value, Report };

  Op op = Op::Value;
  JobId id = 0;
  Time start = 0;
  Time len = 1;
  Rat weight = Rat(1);
  std::optional<Rat> expect;

  Job job() const { return Job{id, start, len, weight}; }
};

inline std::string format_trace_event(const TraceEvent& e) {
  std::ostringstream os;
  switch (e.op) {
    case TraceEvent::Op::Insert:
      os << "op=insert id=" << e.id << " start=" << e.start
         << " len=" << e.len << " weight=" << e.weight.to_string();
      break;
    case TraceEvent::Op::Delete:
      os << "op=delete id=" << e.id;
      break;
    case TraceEvent::Op::Query:
      os << "op=query id=" << e.id;
      break;
    case TraceEvent::Op::Value:
      os << "op=value";
      break;
    case TraceEvent::Op::Report:
      os << "op=report";
      break;
  }
  if (e.expect) os << " expect=" << e.expect->to_string();
  return os.str();
}

inline TraceEvent parse_trace_line(std::string_view line, int line_no) {
  auto fail = [&](const std::string& what) -> void {
    throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                ": " + what);
  };
  TraceEvent e;
  bool saw_op = false, saw_id = false, saw_start = false, saw_len = false;
  std::istringstream in{std::string(line)};
  std::string field;
  while (in >> field) {
    auto eq = field.find('=');
    if (eq == std::string::npos) fail("field without '=': " + field);
    std::string key = field.substr(0, eq);
    std::string val = field.substr(eq + 1);
    try {
      if (key == "op") {
        saw_op = true;
        if (val == "insert") e.op = TraceEvent::Op::Insert;
        else if (val == "delete") e.op = TraceEvent::Op::Delete;
        else if (val == "query") e.op = TraceEvent::Op::Query;
        else if (val == "value") e.op = TraceEvent::Op::Value;
        else if (val == "report") e.op = TraceEvent::Op::Report;
        else fail("unknown op '" + val + "'");
      } else if (key == "id") {
        saw_id = true;
        e.id = (JobId)std::stoull(val);
      } else if (key == "start") {
        saw_start = true;
        e.start = std::stoll(val);
      } else if (key == "len") {
        saw_len = true;
        e.len = std::stoll(val);
      } else if (key == "weight") {
        e.weight = Rat::parse(val);
      } else if (key == "expect") {
        e.expect = Rat::parse(val);
      } else {
        fail("unknown field '" + key + "'");
      }
    } catch (const std::invalid_argument& ex) {
      std::string msg = ex.what();
      if (msg.rfind("trace line", 0) == 0) throw;
      fail("bad value for '" + key + "': " + val);
    } catch (const std::out_of_range&) {
      fail("value out of range for '" + key + "': " + val);
    }
  }
  if (!saw_op) fail("missing op field");
  switch (e.op) {
    case TraceEvent::Op::Insert:
      if (!saw_id || !saw_start || !saw_len)
        fail("insert needs id, start, len");
      break;
    case TraceEvent::Op::Delete:
    case TraceEvent::Op::Query:
      if (!saw_id) fail("missing id field");
      break;
    default:
      if (saw_id || saw_start || saw_len) fail("unexpected job fields");
      break;
  }
  return e;
}

inline std::vector<TraceEvent> parse_trace(std::istream& in) {
  std::vector<TraceEvent> events;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    events.push_back(parse_trace_line(line, line_no));
  }
  return events;
}

// ---------------------------------------------------------------------------
// Deterministic workload generators. The same (kind, parameters, seed)
// always produces the same stream.

struct GenParams {
  std::string kind;  // uniform | tight_chain | nested_heavy | clustered
  int n = 100;       // ops for uniform/clustered, jobs otherwise
  Time horizon = 1 << 10;
  int machines = 1;
  std::int64_t max_weight = 1;
  std::uint64_t seed = 0;
};

inline std::vector<TraceEvent> generate_trace(const GenParams& p) {
  std::vector<TraceEvent> out;
  SplitMix64 rng(p.seed);
  auto push_insert = [&](JobId id, Time s, Time l, Rat w) {
    TraceEvent e;
    e.op = TraceEvent::Op::Insert;
    e.id = id;
    e.start = s;
    e.len = l;
    e.weight = w;
    out.push_back(e);
  };

  if (p.kind == "uniform") {
    std::vector<JobId> live;
    JobId next = 0;
    for (int i = 0; i < p.n; ++i) {
      std::uint64_t roll = rng.below(100);
      if (live.empty() || roll < 60) {
        Time len = rng.range(1, std::max<Time>(1, p.horizon / 8));
        Time start = rng.range(0, p.horizon - len);
        Rat w = p.max_weight <= 1 ? Rat(1) : Rat(rng.range(1, p.max_weight));
        push_insert(next, start, len, w);
        live.push_back(next++);
      } else if (roll < 85) {
        std::size_t pick = rng.below(live.size());
        TraceEvent e;
        e.op = TraceEvent::Op::Delete;
        e.id = live[pick];
        out.push_back(e);
        live.erase(live.begin() + pick);
      } else {
        TraceEvent e;
        e.op = TraceEvent::Op::Query;
        e.id = live[rng.below(live.size())];
        out.push_back(e);
      }
    }
  } else if (p.kind == "tight_chain") {
    // job i spans [i, i+M)
    for (int i = 0; i < p.n; ++i)
      push_insert((JobId)i, i, p.machines, Rat(1));
  } else if (p.kind == "nested_heavy") {
    // per group: one long job of reward w over [0, 2w) with w unit jobs
    // inside it
    const std::int64_t w = std::max<std::int64_t>(1, p.max_weight);
    JobId next = 0;
    for (int g = 0; g < p.n; ++g) {
      Time base = (Time)g * 2 * w;
      push_insert(next++, base, 2 * w, Rat(w));
      for (std::int64_t i = 0; i < w; ++i)
        push_insert(next++, base + 2 * i, 1, Rat(1));
    }
  } else if (p.kind == "clustered") {
    // bursts of overlapping jobs around random centers
    JobId next = 0;
    int remaining = p.n;
    while (remaining > 0) {
      Time center = rng.range(0, p.horizon - 1);
      int burst = (int)rng.range(2, 9);
      for (int i = 0; i < burst && remaining > 0; ++i, --remaining) {
        Time len = rng.range(1, std::max<Time>(2, p.horizon / 16));
        Time start = std::clamp<Time>(center - rng.range(0, len), 0,
                                      p.horizon - len);
        Rat w = p.max_weight <= 1 ? Rat(1) : Rat(rng.range(1, p.max_weight));
        push_insert(next++, start, len, w);
      }
    }
  } else {
    throw std::invalid_argument("unknown trace kind '" + p.kind + "'");
  }
  TraceEvent v;
  v.op = TraceEvent::Op::Value;
  out.push_back(v);
  return out;
}

}  // namespace isched
