#include "gevmiss/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "gevmiss/errors.hpp"

namespace gevmiss {

namespace {

using nlohmann::json;
namespace chr = std::chrono;

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string at_line(std::size_t line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

// Reads lines, stripping a UTF-8 byte-order mark from the first one and
// skipping blank lines. Returns false at end of input.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string_view& out) {
    while (std::getline(in_, buf_)) {
      ++line_;
      std::string_view v = buf_;
      if (line_ == 1 && v.starts_with("\xEF\xBB\xBF")) v.remove_prefix(3);
      v = trim(v);
      if (v.empty()) continue;
      out = v;
      return true;
    }
    return false;
  }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::string buf_;
  std::size_t line_ = 0;
};

void expect_header(LineReader& reader, std::string_view header) {
  std::string_view line;
  if (!reader.next(line)) throw ParseError("empty input: expected header '" + std::string(header) + "'", 1);
  if (line != header) {
    throw ParseError(at_line(reader.line(), "expected header '" + std::string(header) + "', got '" +
                                                std::string(line) + "'"),
                     reader.line());
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

// Writes `cells` as one CSV row.
void row(std::ostream& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

std::string fmt(double v) { return format_number(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json stat_json(const StatValue& s) { return {{"value", num(s.value)}, {"mcse", num(s.mcse)}}; }

json errors_json(const ErrorSummary& e) {
  return {{"count", e.count},         {"bias", stat_json(e.bias)},
          {"median_bias", stat_json(e.median_bias)}, {"sd", stat_json(e.sd)},
          {"iqr", stat_json(e.iqr)},   {"rmse", stat_json(e.rmse)},
          {"mae", stat_json(e.mae)}};
}

json estimator_list(const std::vector<Estimator>& list) {
  json out = json::array();
  for (auto e : list) out.push_back(std::string(to_string(e)));
  return out;
}

}  // namespace

std::size_t RawSeries::missing_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](const auto& v) { return !v.has_value(); }));
}

chr::sys_days parse_iso_date(std::string_view text) {
  text = trim(text);
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  const bool shape = text.size() == 10 && text[4] == '-' && text[7] == '-';
  if (!shape || !parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d)) {
    throw DomainError("malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  const chr::year_month_day ymd{chr::year{y}, chr::month{m}, chr::day{d}};
  if (!ymd.ok()) throw DomainError("invalid calendar date '" + std::string(text) + "'");
  return chr::sys_days{ymd};
}

RawSeries parse_series(std::istream& in) {
  LineReader reader(in);
  expect_header(reader, "date,value");

  RawSeries s;
  std::string_view line;
  while (reader.next(line)) {
    const auto n = reader.line();
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw ParseError(at_line(n, "expected 2 fields"), n);

    chr::sys_days date;
    try {
      date = parse_iso_date(cells[0]);
    } catch (const DomainError& e) {
      throw ParseError(at_line(n, e.what()), n);
    }

    std::optional<double> value;
    if (!cells[1].empty() && cells[1] != "NA") {
      double v = 0.0;
      try {
        v = parse_number(cells[1]);
      } catch (const DomainError& e) {
        throw ParseError(at_line(n, e.what()), n);
      }
      if (!std::isfinite(v)) throw ParseError(at_line(n, "value must be finite"), n);
      value = v;
    }

    if (!s.dates.empty()) {
      const auto prev = s.dates.back();
      if (date == prev) throw ParseError(at_line(n, "duplicate date " + std::string(cells[0])), n);
      if (date < prev) throw ParseError(at_line(n, "dates must be increasing"), n);
      for (auto d = prev + chr::days{1}; d < date; d += chr::days{1}) {
        s.dates.push_back(d);
        s.values.emplace_back();
      }
    }
    s.dates.push_back(date);
    s.values.push_back(value);
  }
  if (s.dates.empty()) throw ParseError("no data rows", 0);
  if (s.missing_count() == s.size()) throw ParseError("every value is missing", 0);
  return s;
}

RawSeries read_series(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_series(in);
}

std::string_view to_string(BlockScheme s) noexcept {
  switch (s) {
    case BlockScheme::calendar_year: return "calendar_year";
    case BlockScheme::fixed_length: return "fixed_length";
  }
  return "?";
}

BlockScheme parse_block_scheme(std::string_view name) {
  if (name == "calendar_year") return BlockScheme::calendar_year;
  if (name == "fixed_length") return BlockScheme::fixed_length;
  throw DomainError("unknown block scheme '" + std::string(name) + "'");
}

void BlockSpec::validate() const {
  if (length < 1) throw DomainError("block length must be at least 1");
  if (min_obs < 1) throw DomainError("min_obs must be at least 1");
}

BlockExtraction extract_block_maxima(const RawSeries& series, const BlockSpec& spec) {
  spec.validate();
  if (series.dates.size() != series.values.size()) {
    throw DomainError("series dates and values differ in length");
  }
  if (series.dates.empty()) throw InsufficientDataError("empty series", 0);

  struct Acc {
    std::int64_t id;
    std::int64_t n_full;
    double max = -std::numeric_limits<double>::infinity();
    std::int64_t n_obs = 0;
  };
  std::vector<Acc> acc;

  const auto first = series.dates.front();
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::int64_t id = 0;
    std::int64_t n_full = spec.length;
    if (spec.scheme == BlockScheme::calendar_year) {
      const chr::year y = chr::year_month_day{series.dates[i]}.year();
      id = static_cast<int>(y);
      n_full = y.is_leap() ? 366 : 365;
    } else {
      id = (series.dates[i] - first).count() / spec.length + 1;
    }
    if (acc.empty() || acc.back().id != id) acc.push_back({id, n_full});
    if (const auto& v = series.values[i]) {
      acc.back().max = std::max(acc.back().max, *v);
      ++acc.back().n_obs;
    }
  }

  BlockExtraction out;
  std::vector<BlockRecord> kept;
  for (const auto& a : acc) {
    if (a.n_obs < spec.min_obs) {
      out.dropped.push_back(a.id);
    } else {
      kept.push_back({a.id, a.max, a.n_obs, a.n_full});
    }
  }
  if (kept.empty()) {
    throw InsufficientDataError("no block has at least " + std::to_string(spec.min_obs) +
                                    " non-missing values",
                                0);
  }
  out.blocks = BlockMaximaSet(std::move(kept));
  return out;
}

MissingnessReport missingness_report(const BlockExtraction& extraction) {
  MissingnessReport r;
  std::int64_t obs = 0;
  std::int64_t full = 0;
  for (const auto& b : extraction.blocks.blocks()) {
    obs += b.n_obs;
    full += b.n_full;
    r.block_id.push_back(b.block_id);
    r.missing_fraction.push_back(b.missing_fraction());
  }
  r.total_missing_fraction = 1.0 - static_cast<double>(obs) / static_cast<double>(full);
  r.dropped = extraction.dropped;
  return r;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  text = trim(text);
  if (text == "NA") return std::numeric_limits<double>::quiet_NaN();
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw DomainError("malformed number '" + std::string(text) + "'");
  }
  return v;
}

void write_blocks_csv(std::ostream& out, const BlockMaximaSet& blocks) {
  out << "block_id,maximum,n_obs,n_full\n";
  for (const auto& b : blocks.blocks()) {
    row(out, {fmt(b.block_id), fmt(b.maximum), fmt(b.n_obs), fmt(b.n_full)});
  }
}

BlockMaximaSet parse_blocks_csv(std::istream& in) {
  LineReader reader(in);
  expect_header(reader, "block_id,maximum,n_obs,n_full");
  std::vector<BlockRecord> blocks;
  std::string_view line;
  while (reader.next(line)) {
    const auto n = reader.line();
    const auto cells = split(line, ',');
    if (cells.size() != 4) throw ParseError(at_line(n, "expected 4 fields"), n);
    BlockRecord b;
    if (!parse_int(cells[0], b.block_id)) throw ParseError(at_line(n, "malformed block_id"), n);
    try {
      b.maximum = parse_number(cells[1]);
    } catch (const DomainError& e) {
      throw ParseError(at_line(n, e.what()), n);
    }
    if (!parse_int(cells[2], b.n_obs)) throw ParseError(at_line(n, "malformed n_obs"), n);
    if (!parse_int(cells[3], b.n_full)) throw ParseError(at_line(n, "malformed n_full"), n);
    if (!std::isfinite(b.maximum)) throw ParseError(at_line(n, "maximum must be finite"), n);
    if (b.n_obs < 1 || b.n_obs > b.n_full) {
      throw ParseError(at_line(n, "requires 1 <= n_obs <= n_full"), n);
    }
    blocks.push_back(b);
  }
  if (blocks.empty()) throw ParseError("no data rows", 0);
  return BlockMaximaSet(std::move(blocks));
}

BlockMaximaSet read_blocks_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_blocks_csv(in);
}

json missingness_to_json(const MissingnessReport& report) {
  json blocks = json::array();
  for (std::size_t i = 0; i < report.block_id.size(); ++i) {
    blocks.push_back(
        {{"block_id", report.block_id[i]}, {"missing_fraction", report.missing_fraction[i]}});
  }
  return {{"total_missing_fraction", report.total_missing_fraction},
          {"blocks", blocks},
          {"dropped_blocks", report.dropped},
          {"dropped_count", report.dropped.size()}};
}

json fit_to_json(const FitResult& fit) {
  json vcov = json::array();
  for (int i = 0; i < 3; ++i) {
    json r = json::array();
    for (int j = 0; j < 3; ++j) r.push_back(num(fit.vcov(i, j)));
    vcov.push_back(r);
  }
  return {{"estimator", std::string(to_string(fit.estimator))},
          {"converged", fit.converged},
          {"message", fit.message},
          {"params",
           {{"mu", num(fit.params.mu())},
            {"sigma", num(fit.params.sigma())},
            {"xi", num(fit.params.xi())}}},
          {"se", {{"mu", num(fit.se[0])}, {"sigma", num(fit.se[1])}, {"xi", num(fit.se[2])}}},
          {"vcov", vcov},
          {"loglik", num(fit.loglik)},
          {"n_blocks_used", fit.n_blocks_used},
          {"iterations", fit.iterations}};
}

void write_return_levels_csv(std::ostream& out, const std::vector<ReturnLevelEstimate>& rows) {
  out << "period,point,lo,hi,method\n";
  const double na = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    row(out, {fmt(r.period_r), fmt(r.point), fmt(r.ok ? r.lo : na), fmt(r.ok ? r.hi : na),
              std::string(to_string(r.method))});
  }
}

void write_pp_csv(std::ostream& out, const std::vector<PpPoint>& points) {
  out << "expected,observed,lo,hi\n";
  for (const auto& p : points) row(out, {fmt(p.expected), fmt(p.observed), fmt(p.lo), fmt(p.hi)});
}

void write_qq_csv(std::ostream& out, const std::vector<QqPoint>& points) {
  out << "model_q,adjusted_max,lo,hi\n";
  for (const auto& p : points) {
    row(out, {fmt(p.model_quantile), fmt(p.adjusted_maximum), fmt(p.lo), fmt(p.hi)});
  }
}

void write_rl_plot_csv(std::ostream& out, const ReturnLevelPlot& plot) {
  out << "r,x_axis,z,lo,hi,kind\n";
  const std::string na = "NA";
  for (const auto& p : plot.curve) {
    row(out, {fmt(p.r), fmt(p.x_axis), fmt(p.z), fmt(p.lo), fmt(p.hi), "curve"});
  }
  for (const auto& p : plot.empirical) {
    row(out, {fmt(p.r), fmt(p.x_axis), fmt(p.z), na, na, "empirical"});
  }
}

void write_density_csv(std::ostream& out, const DensityPlot& plot) {
  out << "kind,bin_left,bin_right,height,grid_z,pdf\n";
  const std::string na = "NA";
  for (const auto& b : plot.bins) {
    row(out, {"histogram", fmt(b.left), fmt(b.right), fmt(b.height), na, na});
  }
  for (std::size_t i = 0; i < plot.grid_z.size(); ++i) {
    row(out, {"curve", na, na, na, fmt(plot.grid_z[i]), fmt(plot.pdf[i])});
  }
}

std::string period_label(double r) {
  char buf[64];
  const auto res = (r == std::floor(r) && std::abs(r) < 1e15)
                       ? std::to_chars(buf, buf + sizeof buf, static_cast<long long>(r))
                       : std::to_chars(buf, buf + sizeof buf, r);
  return std::string(buf, res.ptr);
}

void write_influence_csv(std::ostream& out, const InfluenceCurve& curve) {
  out << "z_normal,inf_mu,inf_sigma,inf_xi";
  for (double r : curve.periods) out << ",inf_rl" << period_label(r);
  out << '\n';
  for (std::size_t j = 0; j < curve.grid_z.size(); ++j) {
    out << fmt(curve.grid_z[j]) << ',' << fmt(curve.mu[j]) << ',' << fmt(curve.sigma[j]) << ','
        << fmt(curve.xi[j]);
    for (const auto& rl : curve.rl) out << ',' << fmt(rl[j]);
    out << '\n';
  }
}

SimulationConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object", 0);
  SimulationConfig c;

  const auto real = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw ParseError(std::string(key) + " must be a number", 0);
    field = j[key].get<double>();
  };
  const auto integer = [&](const char* key, std::int64_t& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) throw ParseError(std::string(key) + " must be an integer", 0);
    field = j[key].get<std::int64_t>();
  };
  const auto estimators = [&](const char* key, std::vector<Estimator>& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) throw ParseError(std::string(key) + " must be an array", 0);
    field.clear();
    for (const auto& e : j[key]) {
      if (!e.is_string()) throw ParseError(std::string(key) + " entries must be strings", 0);
      try {
        field.push_back(parse_estimator(e.get<std::string>()));
      } catch (const DomainError& err) {
        throw ParseError(std::string(key) + ": " + err.what(), 0);
      }
    }
  };

  static const std::vector<std::string> known{
      "distribution", "maxar_theta", "b",          "n",        "miss_upper",
      "reps",         "seed",        "estimators", "rl_period", "ci_level",
      "discard_threshold", "profile_intervals"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError("unknown config key '" + key + "'", 0);
    }
  }

  if (j.contains("distribution")) {
    if (!j["distribution"].is_string()) throw ParseError("distribution must be a string", 0);
    try {
      c.dist.tag = parse_distribution(j["distribution"].get<std::string>());
    } catch (const DomainError& err) {
      throw ParseError(err.what(), 0);
    }
  }
  real("maxar_theta", c.dist.maxar_theta);
  integer("b", c.b);
  integer("n", c.n);
  real("miss_upper", c.miss_upper);
  integer("reps", c.reps);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      throw ParseError("seed must be a non-negative integer", 0);
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  estimators("estimators", c.estimators);
  real("rl_period", c.rl_period);
  real("ci_level", c.ci_level);
  real("discard_threshold", c.discard_threshold);
  estimators("profile_intervals", c.profile_intervals);

  c.validate();
  return c;
}

json config_to_json(const SimulationConfig& c) {
  return {{"distribution", std::string(to_string(c.dist.tag))},
          {"maxar_theta", c.dist.maxar_theta},
          {"b", c.b},
          {"n", c.n},
          {"miss_upper", c.miss_upper},
          {"reps", c.reps},
          {"seed", c.seed},
          {"estimators", estimator_list(c.estimators)},
          {"rl_period", c.rl_period},
          {"ci_level", c.ci_level},
          {"discard_threshold", c.discard_threshold},
          {"profile_intervals", estimator_list(c.profile_intervals)}};
}

SimulationConfig read_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  return config_from_json(j);
}

json summary_to_json(const SimulationSummary& s) {
  json estimators = json::array();
  for (const auto& e : s.estimators) {
    json entry = {{"estimator", std::string(to_string(e.estimator))},
                  {"failures", e.failures},
                  {"mu_diff", errors_json(e.mu_diff)},
                  {"sigma_diff", errors_json(e.sigma_diff)},
                  {"xi_diff", errors_json(e.xi_diff)},
                  {"rl_error", errors_json(e.rl_error)}};
    entry["coverage"] = e.coverage_count == 0
                            ? json(nullptr)
                            : json{{"count", e.coverage_count},
                                   {"value", num(e.coverage.value)},
                                   {"mcse", num(e.coverage.mcse)}};
    estimators.push_back(entry);
  }
  return {{"config", config_to_json(s.config)},
          {"true_rl", num(s.true_rl)},
          {"true_rl_assumes_iid", s.true_rl_assumes_iid},
          {"mean_missing_fraction", num(s.mean_missing_fraction)},
          {"estimators", estimators}};
}

void write_replicates_csv(std::ostream& out, const std::vector<ReplicateRecord>& records) {
  out << "replicate,estimator,status,mu,sigma,xi,rl,ci_lo,ci_hi,covered,n_blocks_used,"
         "mean_missing_fraction\n";
  for (const auto& r : records) {
    row(out, {fmt(r.replicate), std::string(to_string(r.estimator)),
              std::string(to_string(r.status)), fmt(r.mu), fmt(r.sigma), fmt(r.xi), fmt(r.rl),
              fmt(r.ci_lo), fmt(r.ci_hi), r.covered < 0 ? "NA" : std::to_string(r.covered),
              fmt(r.n_blocks_used), fmt(r.mean_missing_fraction)});
  }
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (auto cell : split(text, ',')) {
    const double v = parse_number(cell);
    if (!std::isfinite(v)) throw DomainError("list entries must be finite");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw DomainError("grid must have the form lo:hi:count");
  const double lo = parse_number(parts[0]);
  const double hi = parse_number(parts[1]);
  std::int64_t count = 0;
  if (!parse_int(parts[2], count) || count < 2) throw DomainError("grid count must be at least 2");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw DomainError("grid requires finite lo < hi");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::int64_t k = 0; k < count; ++k) out[k] = lo + step * static_cast<double>(k);
  out.back() = hi;
  return out;
}

json error_to_json(const std::exception& e) {
  json j = {{"message", e.what()}};
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    j["error"] = "parse_error";
    if (p->line() > 0) j["line"] = p->line();
  } else if (const auto* d = dynamic_cast<const InsufficientDataError*>(&e)) {
    j["error"] = "insufficient_data";
    j["count"] = d->count();
  } else if (dynamic_cast<const DomainError*>(&e) != nullptr) {
    j["error"] = "domain_error";
  } else if (dynamic_cast<const SingularMatrixError*>(&e) != nullptr) {
    j["error"] = "singular_matrix";
  } else if (dynamic_cast<const IoError*>(&e) != nullptr) {
    j["error"] = "io_error";
  } else {
    j["error"] = "internal_error";
  }
  return j;
}

}  // namespace gevmiss
