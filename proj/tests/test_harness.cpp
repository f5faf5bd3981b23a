#include "isched/harness.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "isched/trace.hpp"

using namespace isched;

namespace {

std::string report_text(const RunReport& r) {
  std::ostringstream os;
  r.write(os);
  return os.str();
}

// Strips wall-clock fields for determinism comparisons.
std::string stable_part(const std::string& report) {
  std::istringstream in(report);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("latency_", 0) != 0) out << line << "\n";
  return out.str();
}

}  // namespace

TEST_CASE("trace parsing round-trips and rejects malformed lines") {
  auto e = parse_trace_line("op=insert id=3 start=5 len=2 weight=3/2", 1);
  CHECK(e.op == TraceEvent::Op::Insert);
  CHECK(e.id == 3);
  CHECK(e.start == 5);
  CHECK(e.len == 2);
  CHECK(e.weight == Rat(3, 2));
  CHECK(format_trace_event(e) == "op=insert id=3 start=5 len=2 weight=3/2");

  auto q = parse_trace_line("op=query id=7 expect=1", 4);
  CHECK(q.op == TraceEvent::Op::Query);
  REQUIRE(q.expect);
  CHECK(*q.expect == Rat(1));

  CHECK_THROWS_WITH(parse_trace_line("op=insert id=1", 12),
                    Catch::Matchers::ContainsSubstring("12"));
  CHECK_THROWS_WITH(parse_trace_line("op=insert id=1 start=0 len=1 foo=2", 3),
                    Catch::Matchers::ContainsSubstring("unknown field"));
  CHECK_THROWS_WITH(parse_trace_line("op=destroy id=1", 9),
                    Catch::Matchers::ContainsSubstring("unknown op"));
  CHECK_THROWS_WITH(parse_trace_line("op=value id=1", 2),
                    Catch::Matchers::ContainsSubstring("unexpected"));
  CHECK_THROWS_WITH(parse_trace_line("op=insert id=x start=0 len=1", 5),
                    Catch::Matchers::ContainsSubstring("bad value"));
}

TEST_CASE("generators are deterministic per seed") {
  GenParams p;
  p.kind = "uniform";
  p.n = 200;
  p.horizon = 128;
  p.max_weight = 8;
  p.seed = 42;
  auto a = generate_trace(p);
  auto b = generate_trace(p);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(format_trace_event(a[i]) == format_trace_event(b[i]));
  p.seed = 43;
  auto c = generate_trace(p);
  bool same = a.size() == c.size();
  if (same)
    for (std::size_t i = 0; i < a.size(); ++i)
      same = same && format_trace_event(a[i]) == format_trace_event(c[i]);
  CHECK_FALSE(same);
}

TEST_CASE("tight_chain and nested_heavy produce the pinned shapes") {
  GenParams p;
  p.kind = "tight_chain";
  p.n = 4;
  p.machines = 2;
  p.seed = 0;
  auto chain = generate_trace(p);
  REQUIRE(chain.size() == 5);  // 4 inserts + value
  for (int i = 0; i < 4; ++i) {
    CHECK(chain[i].op == TraceEvent::Op::Insert);
    CHECK(chain[i].start == i);
    CHECK(chain[i].len == 2);
  }

  GenParams q;
  q.kind = "nested_heavy";
  q.n = 1;
  q.max_weight = 5;
  q.seed = 0;
  auto nested = generate_trace(q);
  REQUIRE(nested.size() == 7);  // 1 long + 5 units + value
  CHECK(nested[0].start == 0);
  CHECK(nested[0].len == 10);
  CHECK(nested[0].weight == Rat(5));
  for (int i = 1; i <= 5; ++i) {
    CHECK(nested[i].len == 1);
    CHECK(nested[i].weight == Rat(1));
    CHECK(nested[i].start == 2 * (i - 1));
  }
}

TEST_CASE("run_trace on an empty trace reports zero ops") {
  RunOptions opts;
  opts.horizon = 64;
  auto rep = run_trace("dyn1", {}, opts);
  CHECK(rep.ops == 0);
  CHECK(rep.final_value == 0.0);
  CHECK(rep.violations == 0);
}

TEST_CASE("oracle-checked replay keeps the dyn1 ratio above K/(K+1)") {
  GenParams p;
  p.kind = "uniform";
  p.n = 600;
  p.horizon = 512;
  p.seed = 7;
  auto events = generate_trace(p);

  RunOptions opts;
  opts.epsilon = Rat(1, 2);  // K = 2
  opts.horizon = 512;
  opts.oracle_every = 5;
  auto rep = run_trace("dyn1", events, opts);
  CHECK(rep.violations == 0);
  CHECK(rep.ratio_min >= 2.0 / 3.0 - 1e-12);
  CHECK_FALSE(rep.ratio_series.empty());
}

TEST_CASE("expectation annotations are checked") {
  std::vector<TraceEvent> events;
  TraceEvent ins = parse_trace_line("op=insert id=0 start=0 len=4 weight=1", 1);
  events.push_back(ins);
  events.push_back(parse_trace_line("op=value expect=1", 2));
  RunOptions opts;
  opts.horizon = 16;
  CHECK(run_trace("dyn1", events, opts).violations == 0);

  events[1] = parse_trace_line("op=value expect=2", 2);
  CHECK(run_trace("dyn1", events, opts).violations == 1);

  events[1] = parse_trace_line("op=query id=0 expect=1", 2);
  CHECK(run_trace("dyn1", events, opts).violations == 0);
  events[1] = parse_trace_line("op=query id=0 expect=0", 2);
  CHECK(run_trace("dyn1", events, opts).violations == 1);
}

TEST_CASE("malformed trace references abort the replay") {
  RunOptions opts;
  opts.horizon = 16;
  std::vector<TraceEvent> dup = {
      parse_trace_line("op=insert id=0 start=0 len=2 weight=1", 1),
      parse_trace_line("op=insert id=0 start=4 len=2 weight=1", 2)};
  CHECK_THROWS_AS(run_trace("dyn1", dup, opts), std::invalid_argument);
  std::vector<TraceEvent> unknown = {
      parse_trace_line("op=delete id=9", 1)};
  CHECK_THROWS_AS(run_trace("dyn1", unknown, opts), std::invalid_argument);
}

TEST_CASE("replay is deterministic apart from wall-clock fields") {
  GenParams p;
  p.kind = "uniform";
  p.n = 220;
  p.horizon = 64;
  p.max_weight = 6;
  p.seed = 11;
  auto events = generate_trace(p);

  for (std::string algo : {"dyn1", "wdyn", "mdyn", "part-u"}) {
    RunOptions opts;
    opts.epsilon = Rat(1, 2);
    opts.horizon = 64;
    opts.machines = algo == "mdyn" || algo == "part-u" ? 2 : 1;
    opts.oracle_every = 16;
    opts.seed = 5;
    opts.offsets = 2;
    if (algo == "wdyn") opts.weight_cap = Rat(8);
    std::vector<TraceEvent> run_events = events;
    if (algo != "wdyn")
      for (auto& e : run_events) e.weight = Rat(1);
    auto a = stable_part(report_text(run_trace(algo, run_events, opts)));
    auto b = stable_part(report_text(run_trace(algo, run_events, opts)));
    CHECK(a == b);
    CHECK(a.find("algo=" + algo) != std::string::npos);
  }
}

TEST_CASE("every engine id replays a weighted-capable trace cleanly") {
  GenParams p;
  p.kind = "uniform";
  p.n = 120;
  p.horizon = 64;
  p.max_weight = 4;
  p.seed = 13;
  auto events = generate_trace(p);

  for (std::string algo :
       {"dyn1", "lca", "wdyn", "mdyn", "wmdyn", "part-u", "part-w"}) {
    RunOptions opts;
    opts.epsilon = Rat(1, 2);
    opts.horizon = 64;
    opts.machines = (algo == "mdyn" || algo == "wmdyn" || algo == "part-u" ||
                     algo == "part-w")
                        ? 2
                        : 1;
    opts.oracle_every = 10;
    opts.offsets = 2;
    opts.weight_cap = Rat(4);
    // unweighted engines reject weights > 1, so strip weights for them
    std::vector<TraceEvent> run_events = events;
    if (algo == "dyn1" || algo == "lca" || algo == "mdyn" ||
        algo == "part-u") {
      for (auto& e : run_events) e.weight = Rat(1);
    }
    auto rep = run_trace(algo, run_events, opts);
    CHECK(rep.violations == 0);
    CHECK(rep.ops == run_events.size());
  }
}

TEST_CASE("monte_carlo: one trial mean equals that trial, stats fields fill") {
  auto one = monte_carlo("tight-unweighted", 1, 123, 2);
  CHECK(one.trials == 1);
  CHECK(one.stddev == 0.0);
  CHECK(one.mean == one.ci95_lo);

  auto tight = monte_carlo("tight-unweighted", 40, 9, 2);
  CHECK(tight.mean > 2.0 / 3.0 - 0.05);
  CHECK(tight.mean < 2.0 / 3.0 + 0.05);

  auto weighted = monte_carlo("random-weighted", 40, 17, 2);
  CHECK(weighted.mean >= 0.5 - 0.05);

  CHECK_THROWS_AS(monte_carlo("nope", 1, 0, 2), std::invalid_argument);
}

TEST_CASE("probe log lines flow through the lca adapter") {
  std::vector<std::string> lines;
  RunOptions opts;
  opts.horizon = 16;
  opts.epsilon = Rat(1);
  opts.probe_log = [&](Time x, const std::optional<Job>& j) {
    lines.push_back("probe " + std::to_string(x) + " -> " +
                    (j ? std::to_string(j->id) : "none"));
  };
  std::vector<TraceEvent> events = {
      parse_trace_line("op=insert id=4 start=2 len=3 weight=1", 1),
      parse_trace_line("op=query id=4", 2)};
  auto rep = run_trace("lca", events, opts);
  CHECK(rep.queries == 1);
  CHECK(rep.probe_max > 0);
  CHECK(lines.size() >= rep.probe_max);
  CHECK(lines[0].rfind("probe ", 0) == 0);
}
