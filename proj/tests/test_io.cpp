#include <doctest.h>

#include <cmath>
#include <sstream>

#include "k29/io.hpp"
#include "test_util.hpp"

using namespace k29;
using testutil::random_history;

TEST_CASE("format_double round-trips exactly") {
  SplitMix64 rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const double v = (rng.next_unit() - 0.5) * std::pow(10.0, (trial % 61) - 30);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("history JSONL round-trip is lossless") {
  SplitMix64 rng(12);
  const History h = random_history(rng, 100, 3);
  std::stringstream buf;
  write_history_jsonl(h, buf);
  const History back = read_history_jsonl(buf, "<buf>");
  REQUIRE(back.size() == h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    CHECK(back[i].forecast == h[i].forecast);
    CHECK(back[i].label == h[i].label);
    CHECK(testutil::same_vec(back[i].object, h[i].object));
  }
}

TEST_CASE("history JSONL rejects bad records with line numbers") {
  SUBCASE("forecast out of range") {
    std::istringstream in("{\"x\":[],\"p\":1.5,\"y\":1}\n");
    CHECK_THROWS_WITH_AS(read_history_jsonl(in, "<t>"), doctest::Contains(":1:"),
                         ParseError);
  }
  SUBCASE("missing forecast") {
    std::istringstream in("{\"x\":[],\"y\":1}\n");
    CHECK_THROWS_AS(read_history_jsonl(in, "<t>"), ParseError);
  }
  SUBCASE("label not binary, second line") {
    std::istringstream in("{\"x\":[],\"p\":0.5,\"y\":0}\n{\"x\":[],\"p\":0.5,\"y\":3}\n");
    CHECK_THROWS_WITH_AS(read_history_jsonl(in, "<t>"), doctest::Contains(":2:"),
                         ParseError);
  }
}

TEST_CASE("ledger CSV layout") {
  CapitalLedger ledger;
  ledger.values = {1.0, 1.25, 0.5};
  std::ostringstream out;
  write_ledger_csv(ledger, out);
  CHECK(out.str() == "round,capital\n0,1\n1,1.25\n2,0.5\n");
}

TEST_CASE("bins CSV layout") {
  CalibrationBin bin;
  bin.lower = 0.0;
  bin.upper = 0.5;
  bin.count = 2;
  bin.mean_forecast = 0.25;
  bin.mean_label = 0.5;
  bin.gap = 0.25;
  std::ostringstream out;
  write_bins_csv({bin}, out);
  CHECK(out.str() ==
        "lower,upper,count,mean_forecast,mean_label,gap\n0,0.5,2,0.25,0.5,0.25\n");
}

TEST_CASE("bound report JSON layout") {
  BoundReport report;
  report.c_observed = 1.25;
  report.lhs = 0.5;
  report.rhs = 0.946;
  report.holds = true;
  std::ostringstream out;
  write_bound_report_json(report, out);
  CHECK(out.str().find("\"c_observed\": 1.25") != std::string::npos);
  CHECK(out.str().find("\"holds\": true") != std::string::npos);
}

TEST_CASE("csv reading") {
  SUBCASE("well-formed table") {
    std::istringstream in("a,b\n1,2\n3,4.5\n");
    const CsvTable t = read_csv(in, "<t>");
    CHECK(t.columns == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][1] == 4.5);
    CHECK(t.column_index("b") == 1);
    CHECK_THROWS_WITH_AS(t.column_index("missing"), doctest::Contains("missing"),
                         std::invalid_argument);
  }
  SUBCASE("ragged rows are rejected with line numbers") {
    std::istringstream in("a,b\n1,2\n3\n");
    CHECK_THROWS_WITH_AS(read_csv(in, "<t>"), doctest::Contains(":3:"), ParseError);
  }
  SUBCASE("non-numeric cells are rejected") {
    std::istringstream in("a\nfoo\n");
    CHECK_THROWS_AS(read_csv(in, "<t>"), ParseError);
  }
  SUBCASE("empty input is rejected") {
    std::istringstream in("");
    CHECK_THROWS_AS(read_csv(in, "<t>"), ParseError);
  }
  SUBCASE("windows line endings are tolerated") {
    std::istringstream in("a,b\r\n1,2\r\n");
    const CsvTable t = read_csv(in, "<t>");
    CHECK(t.rows[0][1] == 2.0);
  }
}
