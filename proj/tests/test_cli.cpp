#include "doctest.h"

#include <sstream>
#include <string>

#include "json.hpp"

#include "cvtf/cli.hpp"
#include "cvtf/error.hpp"

using namespace cvtf;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("mode and format parsing") {
  CHECK(parse_mode("uni") == SweepMode::Uni);
  CHECK(parse_mode("bi-equal") == SweepMode::BiEqual);
  CHECK(parse_mode("bi-asym") == SweepMode::BiAsym);
  CHECK(parse_mode("gap") == SweepMode::Gap);
  CHECK_THROWS_AS(parse_mode("both"), Error);
  CHECK(std::string(to_string(SweepMode::BiEqual)) == "bi-equal");
  CHECK(parse_format("json") == OutputFormat::JSON);
  CHECK_THROWS_AS(parse_format("xml"), Error);
}

TEST_CASE("grid spec") {
  CHECK(GridSpec{0.0, 1.0, 5}.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(GridSpec{0.3, 0.3, 1}.values() == std::vector<double>{0.3});
  CHECK_THROWS_AS(GridSpec({0.0, 1.0, 0}).values(), Error);
  CHECK_THROWS_AS(GridSpec({1.0, 0.0, 3}).values(), Error);
}

TEST_CASE("headers are fixed per mode") {
  CHECK(csv_header(SweepMode::Uni) == "E,xi,F_coherent,F_tmsv,F_optimal,in_regime,source");
  CHECK(csv_header(SweepMode::BiEqual) == "E,xi,xi_prime,F_coherent,F_tmsv,F_optimal,in_regime,source");
  CHECK(csv_header(SweepMode::BiAsym) ==
        "E,xi,xi_prime,F_coherent,F_tmsv,F_optimal,p_split,in_regime,source");
  CHECK(csv_header(SweepMode::Gap) == "E,xi,delta,in_regime,source");
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 0.830202854996243, 1e-300, 0.0}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("gap sweep") {
  SweepConfig c;
  c.mode = SweepMode::Gap;
  c.xi = 0.1;
  c.E_grid = {0.0, 11.0 / 46.0, 100};
  const auto rows = compute_sweep(c);
  REQUIRE(rows.size() == 100);
  CHECK(*rows[0].value == 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].in_regime);
    CHECK(*rows[i].value > 0.0);
  }
  const auto text = render_sweep(c, rows);
  CHECK(text == render_sweep(c, compute_sweep(c)));
  CHECK(text.find('\r') == std::string::npos);
  const auto ls = lines(text);
  CHECK(ls.size() == 101);
  CHECK(ls[0] == csv_header(SweepMode::Gap));
}

TEST_CASE("uni sweep ordering and regime flags") {
  SweepConfig c;
  c.mode = SweepMode::Uni;
  c.xi_grid = GridSpec{0.01, 0.5, 20};
  c.E_grid = {0.9, 0.9, 1};
  c.E_relative = true;
  for (const auto& row : compute_sweep(c)) {
    CHECK(row.in_regime);
    CHECK(*row.value <= *row.tmsv);
    CHECK(*row.tmsv <= *row.coherent);
  }

  SweepConfig out;
  out.mode = SweepMode::Uni;
  out.xi = 0.1;
  out.E_grid = {0.5, 1.0, 2};
  const auto rows = compute_sweep(out);
  CHECK(rows[0].in_regime);
  CHECK(!rows[1].in_regime);
  CHECK(!rows[1].value);
  const auto ls = lines(render_sweep(out, rows));
  const auto f = fields(ls[2]);
  REQUIRE(f.size() == 7);
  CHECK(f[4].empty());
  CHECK(f[5] == "0");

  out.numeric_fallback = true;
  out.M = 6;
  const auto filled = compute_sweep(out);
  CHECK(filled[1].value);
  CHECK(filled[1].source == "numeric");
  CHECK(filled[0].source == "closed_form");
}

TEST_CASE("E-major ordering") {
  SweepConfig c;
  c.mode = SweepMode::BiEqual;
  c.E_grid = {0.0, 0.1, 3};
  c.xi_grid = GridSpec{0.1, 0.3, 2};
  const auto rows = compute_sweep(c);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].E == rows[1].E);
  CHECK(rows[0].xi < rows[1].xi);
  CHECK(rows[1].E < rows[2].E);
}

TEST_CASE("json output mirrors the rows") {
  SweepConfig c;
  c.mode = SweepMode::BiAsym;
  c.xi = 0.0;
  c.xi_prime = 2.0;
  c.E_grid = {0.05, 0.1, 2};
  c.format = OutputFormat::JSON;
  const auto j = nlohmann::json::parse(render_sweep(c, compute_sweep(c)));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[1]["p_split"].get<double>() == doctest::Approx(0.2));
  CHECK(j[1]["F_optimal"].get<double>() == doctest::Approx(1.0 / 3.0));

  SweepConfig missing;
  missing.mode = SweepMode::BiAsym;
  missing.E_grid = {0.1, 0.1, 1};
  CHECK_THROWS_AS(compute_sweep(missing), Error);
}

TEST_CASE("point reports") {
  std::ostringstream out, err;
  PointConfig p;
  p.E = 0.5;
  p.xi = 0.1;
  CHECK(run_point(p, out, err) == 0);
  CHECK(out.str().find("F_optimal: 0.83020285") != std::string::npos);
  CHECK(out.str().find("F_coherent: 0.90909091") != std::string::npos);
  CHECK(out.str().find("F_tmsv: 0.83333333") != std::string::npos);

  std::ostringstream o2, e2;
  p.E = 2.0;
  CHECK(run_point(p, o2, e2) == 2);
  CHECK(e2.str().find("0.84615") != std::string::npos);

  std::ostringstream o3, e3;
  p.allow_out_of_regime = true;
  CHECK(run_point(p, o3, e3) == 0);

  std::ostringstream o4, e4;
  PointConfig g;
  g.mode = SweepMode::Gap;
  g.E = 0.1;
  g.xi = 0.1;
  g.verify = true;
  CHECK(run_point(g, o4, e4) == 0);
  CHECK(o4.str().find("delta: 0.0001316") != std::string::npos);
}

TEST_CASE("verification filter and tolerance override") {
  VerifyOptions o;
  o.only = "gap";
  const auto r = run_verification(o);
  REQUIRE(r.size() == 1);
  CHECK(r[0].passed());

  o.tol = 1e-300;
  o.only = "oracle";
  const auto tight = run_verification(o);
  CHECK(!tight[0].passed());
  CHECK(render_verification(tight).find("FAIL") != std::string::npos);

  o.only = "nope";
  CHECK_THROWS_AS(run_verification(o), Error);
  CHECK(verify_groups().size() == 9);
}
