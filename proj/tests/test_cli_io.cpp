#include <catch2/catch_amalgamated.hpp>

#include <clocale>
#include <cstring>
#include <cmath>
#include <limits>
#include <locale>
#include <random>
#include <sstream>

#include "gevmiss/cli_io.hpp"
#include "gevmiss/errors.hpp"

using namespace gevmiss;
namespace chr = std::chrono;

namespace {

RawSeries parse(const std::string& text) {
  std::istringstream in(text);
  return parse_series(in);
}

RawSeries fixed_series(const std::vector<std::optional<double>>& values) {
  RawSeries s;
  const auto start = chr::sys_days{chr::year{2001} / 1 / 1};
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.dates.push_back(start + chr::days{static_cast<int>(i)});
    s.values.push_back(values[i]);
  }
  return s;
}

std::size_t parse_error_line(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return std::numeric_limits<std::size_t>::max();
}

}  // namespace

TEST_CASE("series with one NA has length three") {
  const auto s = parse("date,value\n2020-01-01,1.5\n2020-01-02,NA\n2020-01-03,2\n");
  REQUIRE(s.size() == 3);
  CHECK(s.missing_count() == 1);
  CHECK(*s.values[0] == 1.5);
  CHECK_FALSE(s.values[1].has_value());
}

TEST_CASE("empty field is missing and CRLF is accepted") {
  const auto s = parse("\xEF\xBB\xBF" "date,value\r\n2020-01-01,\r\n2020-01-02,3\r\n");
  REQUIRE(s.size() == 2);
  CHECK_FALSE(s.values[0].has_value());
  CHECK(*s.values[1] == 3.0);
}

TEST_CASE("absent dates are filled with missing values") {
  const auto s = parse("date,value\n2020-02-26,1\n2020-03-03,2\n");
  // 27, 28, 29 Feb and 1, 2 Mar are absent in a leap year.
  REQUIRE(s.size() == 7);
  CHECK(s.missing_count() == 5);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s.dates[i] - s.dates[i - 1] == chr::days{1});
}

TEST_CASE("malformed rows report their line number") {
  CHECK(parse_error_line("date,value\n2020-01-01,1\n2020-13-01,2\n") == 3);
  CHECK(parse_error_line("date,value\n2020-01-01,1\n2020-01-02,abc\n") == 3);
  CHECK(parse_error_line("date,value\n2020-01-01,1\n\n2020-02-30,1\n") == 4);
  CHECK(parse_error_line("date,value\n2020/01/01,1\n") == 2);
  CHECK(parse_error_line("date,value\n2020-01-01,1,2\n") == 2);
  CHECK(parse_error_line("date,value\n2020-01-01,1\n2020-01-01,2\n") == 3);
  CHECK(parse_error_line("date,value\n2020-01-02,1\n2020-01-01,2\n") == 3);
  CHECK(parse_error_line("when,value\n2020-01-01,1\n") == 1);
  CHECK(parse_error_line("date,value\n2020-01-01,inf\n") == 2);
  CHECK_THROWS_AS(parse("date,value\n2020-01-01,NA\n"), ParseError);
  CHECK_THROWS_AS(parse("date,value\n"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("fixed-length blocks by hand enumeration") {
  const std::optional<double> na;
  const auto s = fixed_series({1.0, na, 3.0, 2.0, na, 4.0, 4.0, na, na, na});
  const auto ex = extract_block_maxima(s, {BlockScheme::fixed_length, 5, 1});
  REQUIRE(ex.blocks.size() == 2);
  CHECK(ex.blocks.maxima() == std::vector<double>{3.0, 4.0});
  CHECK(ex.blocks[0].n_obs == 3);
  CHECK(ex.blocks[1].n_obs == 2);
  CHECK(ex.blocks[0].n_full == 5);
  CHECK(ex.blocks[1].n_full == 5);
  CHECK(ex.dropped.empty());

  const auto strict = extract_block_maxima(s, {BlockScheme::fixed_length, 5, 3});
  REQUIRE(strict.blocks.size() == 1);
  CHECK(strict.dropped == std::vector<std::int64_t>{2});
}

TEST_CASE("calendar years have 365 or 366 days") {
  std::ostringstream csv;
  csv << "date,value\n";
  for (auto d = chr::sys_days{chr::year{2019} / 1 / 1}; d <= chr::sys_days{chr::year{2020} / 12 / 31};
       d += chr::days{1}) {
    const chr::year_month_day ymd{d};
    csv << static_cast<int>(ymd.year()) << '-' << (unsigned(ymd.month()) < 10 ? "0" : "")
        << unsigned(ymd.month()) << '-' << (unsigned(ymd.day()) < 10 ? "0" : "")
        << unsigned(ymd.day()) << ',' << unsigned(ymd.day()) << '\n';
  }
  std::istringstream in(csv.str());
  const auto ex = extract_block_maxima(parse_series(in), {});
  REQUIRE(ex.blocks.size() == 2);
  CHECK(ex.blocks[0].block_id == 2019);
  CHECK(ex.blocks[0].n_full == 365);
  CHECK(ex.blocks[1].block_id == 2020);
  CHECK(ex.blocks[1].n_full == 366);
  CHECK(ex.blocks[1].n_obs == 366);
  CHECK(ex.blocks[1].maximum == 31.0);
}

TEST_CASE("partial and all-missing years") {
  const auto s = parse(
      "date,value\n2000-12-30,5\n2000-12-31,NA\n2001-06-01,NA\n2002-01-01,7\n2002-01-02,1\n");
  const auto ex = extract_block_maxima(s, {});
  REQUIRE(ex.blocks.size() == 2);
  CHECK(ex.blocks[0].block_id == 2000);
  CHECK(ex.blocks[0].n_obs == 1);
  CHECK(ex.blocks[0].n_full == 366);
  CHECK(ex.blocks[1].block_id == 2002);
  CHECK(ex.blocks[1].n_obs == 2);
  CHECK(ex.dropped == std::vector<std::int64_t>{2001});
  const auto report = missingness_report(ex);
  CHECK(report.dropped.size() == 1);

  CHECK_THROWS_AS(extract_block_maxima(s, {BlockScheme::calendar_year, 365, 10}),
                  InsufficientDataError);
  CHECK_THROWS_AS(extract_block_maxima(s, {BlockScheme::fixed_length, 0, 1}), DomainError);
  CHECK_THROWS_AS(extract_block_maxima(s, {BlockScheme::fixed_length, 5, 0}), DomainError);
}

TEST_CASE("missingness report total equals one minus the count ratio") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto len = 3 + static_cast<std::int64_t>(rng() % 20);
    const auto count = 10 + rng() % 300;
    std::vector<std::optional<double>> v(count);
    for (auto& x : v) {
      if (rng() % 4 != 0) x = static_cast<double>(rng() % 1000) / 7.0;
    }
    v[0] = 1.0;
    const auto ex = extract_block_maxima(fixed_series(v), {BlockScheme::fixed_length, len, 1});
    std::int64_t obs = 0;
    std::int64_t full = 0;
    for (const auto& b : ex.blocks.blocks()) {
      obs += b.n_obs;
      full += b.n_full;
    }
    const auto report = missingness_report(ex);
    CHECK(report.total_missing_fraction ==
          1.0 - static_cast<double>(obs) / static_cast<double>(full));
    CHECK(report.block_id.size() == ex.blocks.size());
  }
}

TEST_CASE("numbers use 17 significant digits and round trip exactly") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(100.0) == "100");
  CHECK(format_number(-1.0 / 3.0) == "-0.33333333333333331");
  CHECK(format_number(2.5e-300) == "2.5e-300");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "NA");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(std::isnan(parse_number("NA")));
  CHECK(parse_number("-inf") == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(parse_number("1,5"), DomainError);
  CHECK_THROWS_AS(parse_number(""), DomainError);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t bits = rng();
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(parse_number(format_number(v)) == v);
  }
}

TEST_CASE("block CSV round trip is exact") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<BlockRecord> recs;
    const auto count = 1 + rng() % 60;
    for (std::size_t i = 0; i < count; ++i) {
      const std::int64_t full = 365 + static_cast<std::int64_t>(rng() % 2);
      recs.push_back({static_cast<std::int64_t>(1850 + i), z(rng) * std::exp(3.0 * z(rng)),
                      1 + static_cast<std::int64_t>(rng() % full), full});
    }
    const BlockMaximaSet set(recs);
    std::stringstream io;
    write_blocks_csv(io, set);
    CHECK(parse_blocks_csv(io) == set);
  }
}

TEST_CASE("block CSV rejects bad rows") {
  const auto bad = [](const std::string& text) {
    std::istringstream in(text);
    try {
      (void)parse_blocks_csv(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(bad("block_id,maximum,n_obs,n_full\n1,2.0,3\n") == 2);
  CHECK(bad("block_id,maximum,n_obs,n_full\n1,2.0,366,365\n") == 2);
  CHECK(bad("block_id,maximum,n_obs,n_full\n1,2.0,300,365\n2,NA,300,365\n") == 3);
  CHECK(bad("block_id,maximum,n_obs,n_full\n1.5,2.0,300,365\n") == 2);
  CHECK(bad("block,maximum,n_obs,n_full\n") == 1);
}

TEST_CASE("output does not depend on the global locale") {
  const auto blocks = BlockMaximaSet::from_maxima(std::vector<double>{1234567.25, 0.5},
                                                  std::vector<std::int64_t>{300, 365}, 365);
  std::ostringstream before;
  write_blocks_csv(before, blocks);

  // Thousands grouping and a comma decimal point, if available.
  const char* names[] = {"de_DE.UTF-8", "fr_FR.UTF-8", "de_DE"};
  std::locale old = std::locale::global(std::locale::classic());
  for (const char* name : names) {
    try {
      std::locale::global(std::locale(name));
      std::setlocale(LC_ALL, name);
      break;
    } catch (const std::runtime_error&) {
    }
  }
  struct Grouped : std::numpunct<char> {
    char do_decimal_point() const override { return ','; }
    char do_thousands_sep() const override { return '.'; }
    std::string do_grouping() const override { return "\3"; }
  };
  std::ostringstream after;
  after.imbue(std::locale(std::locale::classic(), new Grouped));
  write_blocks_csv(after, blocks);
  std::locale::global(old);
  std::setlocale(LC_ALL, "C");

  CHECK(after.str() == before.str());
  CHECK(before.str() == "block_id,maximum,n_obs,n_full\n1,1234567.25,300,365\n2,0.5,365,365\n");
}

TEST_CASE("config JSON round trip and schema errors") {
  SimulationConfig c;
  c.dist = {Distribution::maxar1, 0.25};
  c.b = 30;
  c.n = 120;
  c.miss_upper = 0.4;
  c.reps = 77;
  c.seed = 18446744073709551557ull;
  c.estimators = {Estimator::adjust, Estimator::weight2};
  c.rl_period = 50;
  c.ci_level = 0.9;
  c.discard_threshold = 0.5;
  c.profile_intervals = {Estimator::full};
  const auto back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(back.seed == c.seed);

  const auto defaults = config_from_json(nlohmann::json::object());
  CHECK(config_to_json(defaults) == config_to_json(SimulationConfig{}));

  using nlohmann::json;
  CHECK_THROWS_AS(config_from_json(json{{"bogus", 1}}), ParseError);
  CHECK_THROWS_AS(config_from_json(json{{"b", 2.5}}), ParseError);
  CHECK_THROWS_AS(config_from_json(json{{"seed", -1}}), ParseError);
  CHECK_THROWS_AS(config_from_json(json{{"distribution", "cauchy"}}), ParseError);
  CHECK_THROWS_AS(config_from_json(json{{"estimators", {"adjust", "mle"}}}), ParseError);
  CHECK_THROWS_AS(config_from_json(json::array()), ParseError);
  CHECK_THROWS_AS(config_from_json(json{{"miss_upper", 1.5}}), DomainError);
}

TEST_CASE("fit JSON writes non-finite values as null") {
  FitResult f;
  f.params = GevParams(1.0, 2.0, 0.1);
  f.se = {0.1, std::numeric_limits<double>::quiet_NaN(), 0.01};
  f.estimator = Estimator::weight1;
  const auto j = fit_to_json(f);
  CHECK(j["estimator"] == "weight1");
  CHECK(j["se"]["sigma"].is_null());
  CHECK(j["params"]["sigma"] == 2.0);
  CHECK(j["vcov"].size() == 3);
}

TEST_CASE("plot and table writers follow their schemas") {
  std::ostringstream rl;
  ReturnLevelEstimate a{100.0, 5.0, 4.0, std::numeric_limits<double>::infinity(),
                        IntervalMethod::profile, false, true, true, ""};
  ReturnLevelEstimate b{25.0, 3.0, 0.0, 0.0, IntervalMethod::delta, false, false, false, "x"};
  write_return_levels_csv(rl, {a, b});
  CHECK(rl.str() == "period,point,lo,hi,method\n100,5,4,inf,profile\n25,3,NA,NA,delta\n");

  std::ostringstream rp;
  ReturnLevelPlot plot;
  plot.curve.push_back({2.0, 0.5, 1.0, 0.75, 1.25, true});
  plot.empirical.push_back({1.5, 0.25, 0.5});
  write_rl_plot_csv(rp, plot);
  CHECK(rp.str() ==
        "r,x_axis,z,lo,hi,kind\n2,0.5,1,0.75,1.25,curve\n1.5,0.25,0.5,NA,NA,empirical\n");

  std::ostringstream dens;
  DensityPlot d;
  d.bins.push_back({0.0, 1.0, 0.5});
  d.grid_z = {0.5};
  d.pdf = {0.25};
  write_density_csv(dens, d);
  CHECK(dens.str() ==
        "kind,bin_left,bin_right,height,grid_z,pdf\nhistogram,0,1,0.5,NA,NA\ncurve,NA,NA,NA,0.5,"
        "0.25\n");

  std::ostringstream inf;
  InfluenceCurve c;
  c.grid_z = {-1.0, 1.0};
  c.mu = {1, 2};
  c.sigma = {3, 4};
  c.xi = {5, 6};
  c.periods = {25.0, 2.5};
  c.rl = {{7, 8}, {9, 10}};
  write_influence_csv(inf, c);
  CHECK(inf.str() ==
        "z_normal,inf_mu,inf_sigma,inf_xi,inf_rl25,inf_rl2.5\n-1,1,3,5,7,9\n1,2,4,6,8,10\n");
}

TEST_CASE("replicates CSV marks unevaluated coverage as NA") {
  ReplicateRecord r;
  r.replicate = 3;
  r.estimator = Estimator::naive;
  r.ci_lo = std::numeric_limits<double>::quiet_NaN();
  r.ci_hi = std::numeric_limits<double>::quiet_NaN();
  std::ostringstream out;
  write_replicates_csv(out, {r});
  CHECK(out.str() ==
        "replicate,estimator,status,mu,sigma,xi,rl,ci_lo,ci_hi,covered,n_blocks_used,"
        "mean_missing_fraction\n3,naive,ok,0,0,0,0,NA,NA,NA,0,0\n");
}

TEST_CASE("list and grid arguments") {
  CHECK(parse_real_list("25,50,100") == std::vector<double>{25, 50, 100});
  CHECK_THROWS_AS(parse_real_list("25,,100"), DomainError);
  const auto g = parse_grid("-4:4:201");
  REQUIRE(g.size() == 201);
  CHECK(g.front() == -4.0);
  CHECK(g.back() == 4.0);
  CHECK(g[100] == Catch::Approx(0.0).margin(1e-15));
  CHECK_THROWS_AS(parse_grid("4:-4:10"), DomainError);
  CHECK_THROWS_AS(parse_grid("-4:4:1"), DomainError);
  CHECK_THROWS_AS(parse_grid("-4:4"), DomainError);
  CHECK(period_label(100.0) == "100");
  CHECK(period_label(1.5) == "1.5");
}

TEST_CASE("errors map to machine-readable kinds") {
  CHECK(error_to_json(ParseError("bad", 4))["line"] == 4);
  CHECK(error_to_json(ParseError("bad", 4))["error"] == "parse_error");
  CHECK(error_to_json(InsufficientDataError("few", 1))["error"] == "insufficient_data");
  CHECK(error_to_json(DomainError("d"))["error"] == "domain_error");
  CHECK(error_to_json(IoError("io"))["error"] == "io_error");
  CHECK(error_to_json(std::runtime_error("x"))["error"] == "internal_error");
}
