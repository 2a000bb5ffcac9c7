#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "sfield/csv_io.hpp"
#include "sfield/error.hpp"
#include "sfield/pipeline.hpp"
#include "sfield/simulate.hpp"

using namespace sfield;

TEST_CASE("coefficient CSV passes values through") {
  std::istringstream in("# dims=2,2 basis=fourier k=2\ncoef_1,coef_2\n1,2\n3,4\n5,6\n7,8.5\n");
  const auto s = read_sample_csv(in);
  CHECK(s.dims() == Dims{2, 2});
  CHECK(s.dimension() == 2);
  CHECK(s.coeffs()(3, 1) == 8.5);
  CHECK(s.coeffs()(1, 0) == 3.0);
}

TEST_CASE("raw curves equal to basis elements project to unit vectors") {
  for (auto kind : {BasisKind::fourier, BasisKind::bspline}) {
    const std::size_t k = 5, m = 64;
    const BasisSpec b = kind == BasisKind::fourier ? BasisSpec::fourier(k) : BasisSpec::bspline(k);
    std::ostringstream csv;
    for (std::size_t i = 0; i < m; ++i) csv << (i ? "," : "") << "raw_" << i + 1;
    csv << '\n';
    for (std::size_t s = 0; s < k; ++s) {
      for (std::size_t i = 0; i < m; ++i) {
        const double u = (i + 0.5) / m;
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", b.evaluate(u)[s]);
        csv << (i ? "," : "") << buf;
      }
      csv << '\n';
    }
    std::istringstream in(csv.str());
    const auto sample = read_sample_csv(in, Dims{k}, BasisChoice{kind, k});
    for (std::size_t s = 0; s < k; ++s)
      for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(sample.coeffs()(s, j) - (s == j ? 1.0 : 0.0)) < 1e-8);
  }
}

TEST_CASE("CSV errors carry their location") {
  auto parse_row = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    std::istringstream in(text);
    try {
      read_sample_csv(in, Dims{2, 2});
    } catch (const ParseError& e) {
      return {e.row(), e.column()};
    }
    return {0, 0};
  };
  CHECK(parse_row("coef_1\n1\n2\n3\n4\n5\n").first == 5);
  CHECK(parse_row("coef_1\n1\n2\n3\n") == std::pair<std::size_t, std::size_t>{3, 0});
  CHECK(parse_row("coef_1,coef_2\n1,2\n3\n5,6\n7,8\n").first == 2);
  CHECK(parse_row("coef_1,coef_2\n1,2\n3,4\n5,nan\n7,8\n") == std::pair<std::size_t, std::size_t>{3, 2});
  CHECK(parse_row("coef_1,coef_2\n1,2\n3,x\n5,6\n7,8\n") == std::pair<std::size_t, std::size_t>{2, 2});
  std::istringstream many("coef_1\n1\n2\n3\n4\n5\n");
  try {
    read_sample_csv(many, Dims{2, 2});
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 5") != std::string::npos);
  }
  std::istringstream header("value_1\n1\n");
  CHECK_THROWS_AS(read_sample_csv(header, Dims{1}), ParseError);
  std::istringstream mismatch("coef_1,coef_2\n1,2\n");
  CHECK_THROWS_AS(read_sample_csv(mismatch, Dims{1}, BasisChoice{BasisKind::fourier, 3}), ParseError);
  std::istringstream nodims("coef_1\n1\n");
  CHECK_THROWS_AS(read_sample_csv(nodims), Error);
}

TEST_CASE("simulated sample survives a CSV round trip bit for bit") {
  const auto x = simulate_sar({7, 6}, generate_operators(3), InnovationSpec::parse("su(1,6)"), 20, 9);
  std::stringstream io;
  write_sample_csv(x, io);
  const auto y = read_sample_csv(io);
  CHECK(y.dims() == x.dims());
  CHECK(y.coeffs() == x.coeffs());
  CHECK(y.basis().kind() == BasisKind::fourier);
}

TEST_CASE("dimension strings") {
  CHECK(parse_dims("25,25") == Dims{25, 25});
  CHECK(parse_dims("12x7x3") == Dims{12, 7, 3});
  CHECK_THROWS_AS(parse_dims("12x"), Error);
  CHECK_THROWS_AS(parse_dims("a,2"), Error);
  CHECK_THROWS_AS(parse_basis_kind("wavelet"), Error);
}

TEST_CASE("pipeline is deterministic and echoes its tuning") {
  const auto x = simulate_sar({15, 15}, generate_operators(1), InnovationSpec::gaussian(), 50, 2);
  const auto a = run_test_pipeline(x, {});
  const auto b = run_test_pipeline(x, {});
  CHECK(a.p_value == b.p_value);
  CHECK(a.statistic == b.statistic);
  const auto& t = a.tuning;
  CHECK(t.q == std::vector<double>{std::sqrt(15.0), std::sqrt(15.0)});
  CHECK(t.score_max_lag == 4);
  CHECK(t.variance_captured >= 0.85);
  CHECK(t.filter_weight >= 0.95);
  CHECK(a.df == static_cast<int>(2 * t.levels));

  TestOptions replay;
  replay.q = t.q;
  replay.grid_points = t.grid_points;
  replay.truncation = t.truncation;
  replay.score_max_lag = t.score_max_lag;
  replay.levels = t.levels;
  const auto c = run_test_pipeline(x, replay);
  CHECK(c.p_value == a.p_value);
}

TEST_CASE("scalar data reduce to the spatial scalar test") {
  const auto x = fixtures::ma_sample({12, 10}, 1, 4);
  const auto rep = run_test_pipeline(x, {});
  CHECK(rep.tuning.levels == 1);
  CHECK(rep.tuning.truncation == 0);
  const auto c = center(x);
  RealMatrix y(1, c.size());
  for (std::size_t s = 0; s < c.size(); ++s) y(0, s) = c.coeffs()(s, 0);
  const auto oracle = jb_test(ScoreField{x.dims(), y, std::vector<char>(c.size(), 1)}, rep.tuning.score_max_lag);
  CHECK(rep.statistic == doctest::Approx(oracle.statistic).epsilon(1e-12));
}

TEST_CASE("stage labels and argument checks") {
  const auto x = fixtures::iid_sample({6, 6}, 3, 1);
  TestOptions big_q;
  big_q.q = std::vector<double>{7.0, 2.0};
  try {
    run_test_pipeline(x, big_q);
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_config);
    CHECK(std::string(e.what()).rfind("spectral density:", 0) == 0);
  }
  TestOptions bad_p;
  bad_p.levels = 4;
  CHECK_THROWS_AS(run_test_pipeline(x, bad_p), Error);
  TestOptions strict;
  strict.strict_boundary = true;
  strict.truncation = 1;
  const auto rep = run_test_pipeline(x, strict);
  CHECK(rep.dims == Dims{6, 6});
}

TEST_CASE("strong alternative is detected") {
  const auto x = simulate_sar({50, 50}, generate_operators(11), InnovationSpec::parse("su(1,6)"), 50, 5);
  CHECK(run_test_pipeline(x, {}).p_value < 0.05);
}
