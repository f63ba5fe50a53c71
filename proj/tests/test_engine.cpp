#include "doctest.h"

#include "pmsim/engine.hpp"
#include "pmsim/scenario.hpp"
#include "pmsim/textio.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace pmsim;

// The numeric fingerprints in this file were frozen from an independent
// reference implementation of the same wiring (straight-line scalar code,
// identical operation order); agreement is required to 1e-9 or tighter.

TEST_CASE("grid_steps counts intervals and tolerates representation error") {
  CHECK(grid_steps(10.0, 0.01) == 1000);
  CHECK(grid_steps(0.07, 0.01) == 7);   // 0.07/0.01 is 7.000000000000001
  CHECK(grid_steps(1.0, 0.3) == 3);     // genuine partial interval discarded
  CHECK(grid_steps(0.065, 0.01) == 6);
  CHECK(grid_steps(0.01, 0.01) == 1);
}

TEST_CASE("snap_to_grid lands on the nearest sample and clamps below zero") {
  CHECK(snap_to_grid(5.003, 0.01) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(snap_to_grid(0.034, 0.01) == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(snap_to_grid(-1.0, 0.01) == 0.0);
  CHECK(snap_to_grid(5.0, 0.01) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("steady-posture run tracks the unit target") {
  const SimConfig cfg = paper_scenario_config("posture");
  const Trace tr = simulate(cfg);
  REQUIRE(tr.rows.size() == 1001);
  CHECK_FALSE(tr.model_mismatch);

  CHECK(tr.rows[0].y == 0.0);
  CHECK(tr.rows[0].posture_error == 1.0);
  CHECK(tr.rows[0].posture_cmd == 0.5);
  CHECK(tr.rows[1].y == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tr.rows[2].y == doctest::Approx(0.08000000000000002).epsilon(1e-9));
  CHECK(tr.rows[3].y == doctest::Approx(0.5399999999999999).epsilon(1e-9));
  CHECK(tr.rows[50].y == doctest::Approx(0.8756357131977051).epsilon(1e-9));

  CHECK(std::abs(tr.rows[1000].y - 1.0) < 0.005);
  CHECK(std::abs(tr.rows[1000].posture_error) < 1e-12);
  CHECK(tr.rows[1000].posture_cmd == doctest::Approx(1.5).epsilon(1e-12));
  // Matched internal model: the estimate converges onto the plant output.
  CHECK(std::abs(tr.rows[1000].posture_est - tr.rows[1000].plant_raw) < 1e-6);
}

TEST_CASE("trace rows satisfy the defining identities") {
  for (const std::string& id : kPaperScenarioIds) {
    const SimConfig cfg = paper_scenario_config(id);
    const Trace tr = simulate(cfg);
    REQUIRE(!tr.rows.empty());
    CHECK(tr.rows[0].posture_error == tr.rows[0].posture_target);
    CHECK(tr.rows[0].movement_error == tr.rows[0].movement_target);
    for (size_t k = 0; k < tr.rows.size(); ++k) {
      const TraceRow& r = tr.rows[k];
      CHECK(r.y == r.plant_raw + r.disturbance);
      CHECK(r.t == static_cast<double>(k) * cfg.ts);
      if (k > 0) {
        CHECK(r.posture_error == r.posture_target - tr.rows[k - 1].posture_est);
        CHECK(r.movement_error == r.movement_target - tr.rows[k - 1].movement_est);
      }
    }
  }
}

TEST_CASE("output disturbance feeds through instantly and is rejected") {
  const SimConfig cfg = paper_scenario_config("posture_ext_perturb");
  const Trace tr = simulate(cfg);
  REQUIRE(tr.rows.size() == 1001);

  // Pre-disturbance: settled on the posture target.
  CHECK(std::abs(tr.rows[499].y - 1.0) < 0.005);
  // First disturbed sample: the -5 lands directly on the measurement.
  CHECK(tr.rows[500].y == doctest::Approx(-4.000000000885028).epsilon(1e-9));
  CHECK(tr.rows[500].y - tr.rows[499].y == doctest::Approx(-5.0).epsilon(1e-6));
  CHECK(tr.rows[500].y <= -3.5);
  // Recovered by the end of the run.
  CHECK(tr.rows[1000].y == doctest::Approx(0.9999999359420135).epsilon(1e-9));
  CHECK(std::abs(tr.rows[1000].y - 1.0) < 0.01);
  // Envelope shrinks from one late window to the next.
  double dev8 = 0.0, dev9 = 0.0;
  for (const TraceRow& r : tr.rows) {
    if (r.t >= 8.0 && r.t < 9.0) dev8 = std::max(dev8, std::abs(r.y - 1.0));
    if (r.t >= 9.0 && r.t < 10.0) dev9 = std::max(dev9, std::abs(r.y - 1.0));
  }
  CHECK(dev9 < dev8);
}

TEST_CASE("movement pulse rides on the posture baseline and plateaus near 6") {
  const auto [tr, m] = run_paper_scenario("pm_no_apa");
  REQUIRE(tr.rows.size() == 1001);

  CHECK(tr.rows[500].y == doctest::Approx(0.9999999991149723).epsilon(1e-9));
  CHECK(tr.rows[501].y == doctest::Approx(3.499999999557487).epsilon(1e-9));
  CHECK(tr.rows[550].y == doctest::Approx(5.378178565878462).epsilon(1e-9));
  CHECK(tr.rows[699].y == doctest::Approx(5.9993499677317965).epsilon(1e-9));
  CHECK(tr.rows[1000].y == doctest::Approx(1.0000184943982506).epsilon(1e-9));

  CHECK(window_mean(tr, 6.5, 7.0) == doctest::Approx(5.996842002446602).epsilon(1e-9));
  CHECK(std::abs(m.movement_plateau - 6.0) < 0.05);
  // With no feedforward, nothing moves the estimate before the target does.
  CHECK(m.movement_error_at_onset == 5.0);
  CHECK(m.max_apa_deviation == 0.0);
  CHECK(m.settled);
}

TEST_CASE("anticipatory injection perturbs posture and trims the onset error") {
  const auto [tr, m] = run_paper_scenario("pm_apa");
  REQUIRE(tr.rows.size() == 1001);

  CHECK(m.movement_plateau == doctest::Approx(5.996833960604102).epsilon(1e-9));
  CHECK(std::abs(m.movement_plateau - 6.0) < 0.05);

  CHECK(m.max_apa_deviation == doctest::Approx(0.5000018498823386).epsilon(1e-9));
  CHECK(m.max_apa_deviation > 0.01);

  CHECK(m.movement_error_at_onset ==
        doctest::Approx(4.999995844530314).epsilon(1e-9));
  CHECK(m.movement_error_at_onset < 5.0);
  CHECK(m.movement_error_at_onset > 4.9);

  // Direction: the injection strictly reduces the onset error.
  const auto [tr2, m2] = run_paper_scenario("pm_no_apa");
  CHECK(m.movement_error_at_onset < m2.movement_error_at_onset);
}

TEST_CASE("closed loop is linear: responses to the two targets superpose") {
  const SimConfig both = paper_scenario_config("pm_no_apa");
  SimConfig posture_only = both;
  posture_only.loops[kMovement].target = constant(0.0);
  SimConfig movement_only = both;
  movement_only.loops[kPosture].target = constant(0.0);

  const Trace tb = simulate(both);
  const Trace tp = simulate(posture_only);
  const Trace tm = simulate(movement_only);
  REQUIRE(tb.rows.size() == tp.rows.size());
  REQUIRE(tb.rows.size() == tm.rows.size());
  double worst = 0.0;
  for (size_t k = 0; k < tb.rows.size(); ++k)
    worst = std::max(worst, std::abs(tb.rows[k].y - tp.rows[k].y - tm.rows[k].y));
  CHECK(worst < 1e-9);
}

TEST_CASE("all-zero targets produce an exactly zero trace") {
  SimConfig cfg = paper_scenario_config("posture");
  cfg.loops[kPosture].target = constant(0.0);
  const Trace tr = simulate(cfg);
  REQUIRE(tr.rows.size() == 1001);
  for (const TraceRow& r : tr.rows) {
    CHECK(r.posture_target == 0.0);
    CHECK(r.posture_apa == 0.0);
    CHECK(r.posture_error == 0.0);
    CHECK(r.posture_cmd == 0.0);
    CHECK(r.posture_est == 0.0);
    CHECK(r.movement_target == 0.0);
    CHECK(r.movement_apa == 0.0);
    CHECK(r.movement_error == 0.0);
    CHECK(r.movement_cmd == 0.0);
    CHECK(r.movement_est == 0.0);
    CHECK(r.disturbance == 0.0);
    CHECK(r.plant_raw == 0.0);
    CHECK(r.y == 0.0);
  }
  const Metrics m = compute_metrics(tr, cfg);
  CHECK(m.final_y == 0.0);
  CHECK(m.movement_plateau == 0.0);
  CHECK(m.max_apa_deviation == 0.0);
  CHECK(m.movement_error_at_onset == 0.0);
  CHECK(m.settled);
}

TEST_CASE("identical configs yield bitwise-identical traces") {
  const SimConfig cfg = paper_scenario_config("pm_apa");
  const Trace a = simulate(cfg);
  const Trace b = simulate(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t k = 0; k < a.rows.size(); ++k) {
    const TraceRow &ra = a.rows[k], &rb = b.rows[k];
    CHECK(ra.t == rb.t);
    CHECK(ra.posture_error == rb.posture_error);
    CHECK(ra.posture_cmd == rb.posture_cmd);
    CHECK(ra.posture_est == rb.posture_est);
    CHECK(ra.movement_error == rb.movement_error);
    CHECK(ra.movement_cmd == rb.movement_cmd);
    CHECK(ra.movement_est == rb.movement_est);
    CHECK(ra.plant_raw == rb.plant_raw);
    CHECK(ra.y == rb.y);
  }
}

TEST_CASE("a destabilizing gain aborts with the offending step and signal") {
  SimConfig cfg = paper_scenario_config("posture");
  set_param(cfg, "posture.kp", 1e8);
  try {
    simulate(cfg);
    FAIL("expected SimulationError");
  } catch (const SimulationError& e) {
    CHECK(e.step() > 0);
    CHECK(!e.signal().empty());
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
  }
}

TEST_CASE("y_at reads grid samples and rejects out-of-span times") {
  const Trace tr = simulate(paper_scenario_config("posture"));
  CHECK(y_at(tr, 0.0) == tr.rows[0].y);
  CHECK(y_at(tr, 5.0) == tr.rows[500].y);
  CHECK(y_at(tr, 10.0) == tr.rows[1000].y);
  CHECK_THROWS_AS(y_at(tr, 10.02), std::out_of_range);
  CHECK_THROWS_AS(y_at(tr, -0.5), std::out_of_range);
  CHECK_THROWS_AS(y_at(Trace{}, 0.0), std::out_of_range);
}

TEST_CASE("window_mean averages over a half-open time window") {
  Trace tr;
  for (int k = 0; k <= 10; ++k) {
    TraceRow r{};
    r.t = 0.1 * static_cast<double>(k);
    r.y = static_cast<double>(k);
    tr.rows.push_back(r);
  }
  // Samples with 0.2 <= t < 0.5 are k = 2, 3, 4.
  CHECK(window_mean(tr, 0.2, 0.5) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(window_mean(tr, 5.0, 6.0), std::out_of_range);
}

TEST_CASE("plateau metric falls back to the end of the run without a pulse") {
  const SimConfig cfg = paper_scenario_config("posture");
  const Trace tr = simulate(cfg);
  const Metrics m = compute_metrics(tr, cfg);
  CHECK(m.movement_plateau == window_mean(tr, 9.5, 10.0));
  CHECK(std::abs(m.movement_plateau - 1.0) < 0.005);
  CHECK(m.movement_error_at_onset == 0.0);  // movement target identically zero
  CHECK(m.settled);
}

TEST_CASE("unknown built-in scenario id is rejected") {
  CHECK_THROWS_AS(paper_scenario_config("bogus"), std::invalid_argument);
  CHECK(kPaperScenarioIds.size() == 4);
  for (const std::string& id : kPaperScenarioIds) {
    CHECK_NOTHROW(paper_scenario_config(id));
  }
}

TEST_CASE("an observer built on a different model flags the trace") {
  SimConfig cfg = paper_scenario_config("posture");
  const StateSpace other = tf_to_ss({1.0}, {1.0, 0.4});
  cfg.loops[kPosture].kalman = make_kalman(other, cfg.loops[kPosture].kalman.noise);
  const Trace tr = simulate(cfg);
  CHECK(tr.model_mismatch);
  const std::string csv = trace_to_csv(tr);
  CHECK(csv.find("observer internal model differs") != std::string::npos);

  const Trace clean = simulate(paper_scenario_config("posture"));
  CHECK_FALSE(clean.model_mismatch);
  CHECK(trace_to_csv(clean).find("observer internal model") == std::string::npos);
}

TEST_CASE("trace CSV starts with the exact column header") {
  const Trace tr = simulate(paper_scenario_config("posture"));
  const std::string csv = trace_to_csv(tr);
  const std::string expected_header =
      "t,posture_target,posture_apa,posture_error,posture_cmd,posture_est,"
      "movement_target,movement_apa,movement_error,movement_cmd,movement_est,"
      "disturbance,plant_raw,y";
  CHECK(csv.rfind(expected_header + "\n", 0) == 0);
  // header + 1001 rows, LF endings, trailing newline
  size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 1002);
  CHECK(csv.back() == '\n');
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("every CSV cell parses back to the in-memory value bit for bit") {
  const Trace tr = simulate(paper_scenario_config("pm_apa"));
  const std::string csv = trace_to_csv(tr);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));  // header
  for (const TraceRow& r : tr.rows) {
    REQUIRE(std::getline(in, line));
    std::vector<double> cells;
    size_t pos = 0;
    while (pos <= line.size()) {
      size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      cells.push_back(parse_double(line.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    REQUIRE(cells.size() == 14);
    const double want[14] = {r.t,
                             r.posture_target, r.posture_apa, r.posture_error,
                             r.posture_cmd, r.posture_est,
                             r.movement_target, r.movement_apa, r.movement_error,
                             r.movement_cmd, r.movement_est,
                             r.disturbance, r.plant_raw, r.y};
    for (int i = 0; i < 14; ++i) CHECK(cells[static_cast<size_t>(i)] == want[i]);
  }
}

TEST_CASE("metrics render as flat key=value text") {
  const auto [tr, m] = run_paper_scenario("pm_apa");
  const std::string text = metrics_to_text(m);
  CHECK(text.find("final_y=") != std::string::npos);
  CHECK(text.find("movement_plateau=") != std::string::npos);
  CHECK(text.find("max_apa_deviation=") != std::string::npos);
  CHECK(text.find("movement_error_at_onset=") != std::string::npos);
  CHECK(text.find("settled=true") != std::string::npos);
  // Value re-parses to the exact metric.
  const std::string key = "movement_error_at_onset=";
  const size_t at = text.find(key) + key.size();
  const double v = parse_double(text.substr(at, text.find('\n', at) - at));
  CHECK(v == m.movement_error_at_onset);
  CHECK(v < 5.0);
  CHECK(v > 4.9);
}

TEST_CASE("number formatting round-trips doubles exactly") {
  const std::vector<double> cases = {0.0,   -0.0,  1.0,    0.01,      1.0 / 3.0,
                                     2e-308, 1e308, -5.5e-5, 0.1 + 0.2, 123456.789};
  for (const double v : cases) {
    const double back = parse_double(format_double(v));
    CHECK(back == v);
  }
  CHECK_THROWS_AS(parse_double("1.2.3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_double("12 "), std::invalid_argument);
  CHECK_THROWS_AS(parse_double("x7"), std::invalid_argument);
}
