// Command-line front end: geodesic traces, cut times, optimal synthesis and
// the cut-time profile, as CSV or JSON lines on stdout.
//
// Exit codes: 0 ok, 1 internal error, 2 usage, 3 unsupported region,
// 4 non-convergence.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "engel/engel.hpp"

namespace {

constexpr int exit_ok          = 0;
constexpr int exit_usage       = 2;
constexpr int exit_unsupported = 3;
constexpr int exit_nonconv     = 4;

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

enum class Format { csv, json };

using Field = std::variant<std::monostate, double, std::string, bool>;

std::string format_number(double v)
{
  if (v == 0.0) { v = 0.0; }  // no "-0"
  return fmt::format("{:.10g}", v);
}

// Writes rows under a fixed list of columns; the CSV header goes out with the first row.
class Table
{
public:
  Table(Format f, std::vector<std::string> columns) : format_(f), columns_(std::move(columns)) {}

  void row(const std::vector<Field> & fields)
  {
    if (format_ == Format::csv) {
      if (!header_done_) {
        print_csv(columns_);
        header_done_ = true;
      }
      std::vector<std::string> cells;
      cells.reserve(fields.size());
      for (const auto & f : fields) { cells.push_back(csv_cell(f)); }
      print_csv(cells);
      return;
    }
    nlohmann::ordered_json j;
    for (std::size_t i = 0; i < columns_.size(); ++i) { j[columns_[i]] = json_cell(fields[i]); }
    std::cout << j.dump() << '\n';
  }

private:
  static void print_csv(const std::vector<std::string> & cells)
  {
    for (std::size_t i = 0; i < cells.size(); ++i) { std::cout << (i ? "," : "") << cells[i]; }
    std::cout << '\n';
  }

  static std::string csv_cell(const Field & f)
  {
    if (const auto * d = std::get_if<double>(&f)) { return format_number(*d); }
    if (const auto * s = std::get_if<std::string>(&f)) {
      if (s->find_first_of(",\"\n") == std::string::npos) { return *s; }
      std::string q = "\"";
      for (char ch : *s) { q += ch == '"' ? std::string("\"\"") : std::string(1, ch); }
      return q + "\"";
    }
    if (const auto * b = std::get_if<bool>(&f)) { return *b ? "true" : "false"; }
    return "";
  }

  static nlohmann::ordered_json json_cell(const Field & f)
  {
    if (const auto * d = std::get_if<double>(&f)) {
      // round-trip through the CSV text so both formats carry identical digits
      return nlohmann::ordered_json::parse(format_number(*d));
    }
    if (const auto * s = std::get_if<std::string>(&f)) { return *s; }
    if (const auto * b = std::get_if<bool>(&f)) { return *b; }
    return nullptr;
  }

  Format format_;
  std::vector<std::string> columns_;
  bool header_done_ = false;
};

Field cut_field(const engel::CutTime & c)
{
  if (c.is_infinite()) { return std::string("inf"); }
  return c.value();
}

double require_finite(double v, const char * what)
{
  if (!std::isfinite(v)) { throw UsageError(std::string(what) + " must be finite"); }
  return v;
}

// Rows of numbers from a batch file: separators are commas and whitespace,
// blank lines and lines starting with '#' are skipped.
std::vector<std::vector<double>> read_batch(const std::string & path, std::size_t width)
{
  std::ifstream in(path);
  if (!in) { throw UsageError("cannot open batch file " + path); }
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char & ch : line) {
      if (ch == ',' || ch == ';' || ch == '\t') { ch = ' '; }
    }
    std::istringstream ss(line);
    std::string tok;
    std::vector<double> row;
    while (ss >> tok) {
      if (row.empty() && tok[0] == '#') { break; }
      double v{};
      const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v)) {
        throw UsageError(fmt::format("{}:{}: not a finite number: '{}'", path, lineno, tok));
      }
      row.push_back(v);
    }
    if (row.empty()) { continue; }
    if (row.size() != width) {
      throw UsageError(fmt::format("{}:{}: expected {} values, got {}", path, lineno, width, row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int error_code(const std::exception & e)
{
  if (dynamic_cast<const engel::Unsupported *>(&e)) { return exit_unsupported; }
  if (dynamic_cast<const engel::NonConvergence *>(&e)) { return exit_nonconv; }
  if (dynamic_cast<const UsageError *>(&e) || dynamic_cast<const engel::DomainError *>(&e)) { return exit_usage; }
  return 1;
}

struct Options
{
  Format format = Format::csv;
  std::string batch;
  double theta = 0.0, c = 0.0, alpha = 0.0, t = 1.0;
  int samples = 101;
  double tol  = 1e-10;
  // looser than the library default so that 8-digit inputs land on A, L, S6
  double region_tol = 1e-8;
  std::vector<double> target;
};

// ---------------------------------------------------------------------------

int cmd_exp(const Options & o)
{
  if (o.samples < 2) { throw UsageError("--samples must be at least 2"); }
  std::vector<std::vector<double>> rows;
  if (o.batch.empty()) {
    rows.push_back({o.theta, o.c, o.alpha, o.t});
  } else {
    rows = read_batch(o.batch, 4);
  }
  const bool batch = !o.batch.empty();
  std::vector<std::string> cols{"t", "x", "y", "z", "v", "theta", "c"};
  if (batch) { cols.insert(cols.begin(), "row"); }
  Table table(o.format, cols);

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const engel::Covector l(require_finite(rows[r][0], "theta"), require_finite(rows[r][1], "c"),
                            require_finite(rows[r][2], "alpha"));
    const double t_end = require_finite(rows[r][3], "t");
    if (!(t_end > 0.0)) { throw UsageError("t must be positive"); }
    for (int i = 0; i < o.samples; ++i) {
      const double s = i + 1 == o.samples ? t_end : t_end * i / (o.samples - 1);
      const auto q   = engel::exp(l, s);
      const auto ls  = engel::flow(l, s);
      std::vector<Field> f{s, q.x, q.y, q.z, q.v, ls.theta, ls.c};
      if (batch) { f.insert(f.begin(), static_cast<double>(r + 1)); }
      table.row(f);
    }
  }
  return exit_ok;
}

int cmd_cut(const Options & o)
{
  std::vector<std::vector<double>> rows;
  if (o.batch.empty()) {
    rows.push_back({o.theta, o.c, o.alpha});
  } else {
    rows = read_batch(o.batch, 3);
  }
  const bool batch = !o.batch.empty();
  std::vector<std::string> cols{"stratum", "t_cut", "conjugate", "branch"};
  if (batch) { cols.insert(cols.begin(), "row"); }
  Table table(o.format, cols);

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const engel::Covector l(require_finite(rows[r][0], "theta"), require_finite(rows[r][1], "c"),
                            require_finite(rows[r][2], "alpha"));
    const auto tc = engel::cut_time(l);
    Field conj;
    if (tc.is_finite()) { conj = engel::conjugate_at_cut(l); }
    std::vector<Field> f{std::string(engel::to_string(tc.stratum().tag)), cut_field(tc), conj,
                         std::string(engel::to_string(tc.branch()))};
    if (batch) { f.insert(f.begin(), static_cast<double>(r + 1)); }
    table.row(f);
  }
  return exit_ok;
}

int cmd_solve(const Options & o)
{
  std::vector<std::vector<double>> rows;
  if (o.batch.empty()) {
    if (o.target.size() != 4) { throw UsageError("solve needs four numbers x y z v"); }
    rows.push_back(o.target);
  } else {
    rows = read_batch(o.batch, 4);
  }
  const bool batch = !o.batch.empty();
  std::vector<std::string> cols{"region", "theta", "c", "alpha", "t1", "residual", "sr_distance"};
  if (batch) {
    cols.insert(cols.begin(), "row");
    cols.push_back("error");
  }
  Table table(o.format, cols);

  engel::SolveOptions so;
  so.tol        = o.tol;
  so.region_tol = o.region_tol;
  int status = exit_ok;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const engel::State q{require_finite(rows[r][0], "x"), require_finite(rows[r][1], "y"),
                         require_finite(rows[r][2], "z"), require_finite(rows[r][3], "v")};
    auto emit = [&](std::vector<Field> f, Field err) {
      if (batch) {
        f.insert(f.begin(), static_cast<double>(r + 1));
        f.push_back(std::move(err));
      }
      table.row(f);
    };
    try {
      const auto res = engel::synthesize(q, so);
      if (res.trajectories.empty()) {
        emit({std::string(engel::to_string(res.region)), {}, {}, {}, 0.0, 0.0, 0.0}, {});
      }
      for (const auto & nu : res.trajectories) {
        emit({std::string(engel::to_string(res.region)), nu.lambda.theta, nu.lambda.c, nu.lambda.alpha, nu.t,
              res.residual, res.sr_distance},
             {});
      }
    } catch (const std::exception & e) {
      if (!batch) { throw; }
      const int code = error_code(e);
      if (status == exit_ok) { status = code; }
      emit({std::string(engel::to_string(engel::classify_target(q, o.region_tol))), {}, {}, {}, {}, {}, {}}, std::string(e.what()));
    }
  }
  return status;
}

int cmd_profile(const Options & o)
{
  std::vector<double> betas;
  if (o.batch.empty()) {
    if (o.samples < 2) { throw UsageError("--steps must be at least 2"); }
    for (int i = 0; i < o.samples; ++i) {
      betas.push_back(i + 1 == o.samples ? 0.5 * std::numbers::pi : 0.5 * std::numbers::pi * i / (o.samples - 1));
    }
  } else {
    for (const auto & row : read_batch(o.batch, 1)) { betas.push_back(row[0]); }
  }
  Table table(o.format, {"beta", "t_cut"});
  for (double b : betas) { table.row({b, cut_field(engel::cut_profile(b))}); }
  return exit_ok;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Sub-Riemannian geodesics on the Engel group"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  const std::map<std::string, Format> formats{{"csv", Format::csv}, {"json", Format::json}};
  app.add_option("--format", o.format, "Output format")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  app.add_option("--batch", o.batch, "Read input rows from a file instead of the arguments");

  auto * exp = app.add_subcommand("exp", "Trace Exp(lambda, s) for s in [0, t]");
  exp->add_option("--theta", o.theta, "theta (radians)");
  exp->add_option("--c", o.c, "c");
  exp->add_option("--alpha", o.alpha, "alpha");
  exp->add_option("--t", o.t, "final time");
  exp->add_option("--samples", o.samples, "number of rows including both ends")->capture_default_str();

  auto * cut = app.add_subcommand("cut", "Cut time of a covector and conjugacy at the cut point");
  cut->add_option("--theta", o.theta, "theta (radians)");
  cut->add_option("--c", o.c, "c");
  cut->add_option("--alpha", o.alpha, "alpha");

  auto * solve = app.add_subcommand("solve", "Optimal trajectories from the identity to (x, y, z, v)");
  solve->add_option("target", o.target, "x y z v")->expected(4);
  solve->add_option("--tol", o.tol, "accepted residual, relative to the target's homogeneous norm")->capture_default_str();
  solve->add_option("--region-tol", o.region_tol, "relative band for the equalities defining A, L, S6 and x z = 0")
    ->capture_default_str();

  auto * profile = app.add_subcommand("profile", "Cut time along lambda = (0, sin beta, cos beta)");
  profile->add_option("--steps,--samples", o.samples, "grid points over [0, pi/2]")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*exp) { return cmd_exp(o); }
    if (*cut) { return cmd_cut(o); }
    if (*solve) { return cmd_solve(o); }
    if (*profile) { return cmd_profile(o); }
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return error_code(e);
  }
  return exit_usage;
}
