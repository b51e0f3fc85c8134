#include "series.hpp"

#include <charconv>
#include <sstream>

#include "errors.hpp"

namespace axbq {

namespace {

constexpr SampleColumn kColumns[] = {
    {"t", &Sample::t},
    {"dt", &Sample::dt},
    {"l1_rho", &Sample::l1_rho},
    {"l2_rho", &Sample::l2_rho},
    {"l3_rho", &Sample::l3_rho},
    {"linf_rho", &Sample::linf_rho},
    {"h1_rho", &Sample::h1_rho},
    {"l2_v", &Sample::l2_v},
    {"h1_v", &Sample::h1_v},
    {"linf_grad_v", &Sample::linf_grad_v},
    {"l2_zeta", &Sample::l2_zeta},
    {"l2_omega", &Sample::l2_omega},
    {"l2_gamma", &Sample::l2_gamma},
    {"h1_gamma", &Sample::h1_gamma},
    {"l6_vr_over_r", &Sample::l6_vr_over_r},
    {"besov_b31_0_rho", &Sample::besov_b31_0_rho},
    {"besov_bp1_1p3p_v", &Sample::besov_bp1_1p3p_v},
    {"int_grad_v2", &Sample::int_grad_v2},
    {"int_grad_gamma2", &Sample::int_grad_gamma2},
    {"int_grad_rho2", &Sample::int_grad_rho2},
    {"int_linf_grad_v", &Sample::int_linf_grad_v},
};

}  // namespace

std::span<const SampleColumn> sample_columns() { return kColumns; }

double Sample::*sample_member(const std::string& name) {
  for (const auto& c : kColumns)
    if (name == c.name) return c.member;
  throw Error(ErrorCode::missing_series, "unknown series column '" + name + "'");
}

TimeSeries splice(const TimeSeries& series, const std::string& column, double t_from, double factor) {
  const auto m = sample_member(column);
  TimeSeries out = series;
  for (auto& row : out.rows)
    if (row.t >= t_from) row.*m *= factor;
  return out;
}

const std::vector<std::string>& timeseries_csv_columns() {
  static const std::vector<std::string> cols{"t",    "l2_rho",  "linf_rho", "l3_rho",   "l2_v",
                                             "h1_v", "l2_zeta", "l2_gamma", "l2_omega", "besov_b31_0_rho"};
  return cols;
}

std::string series_csv(const TimeSeries& s, const std::vector<std::string>& columns) {
  std::vector<std::string> names = columns;
  if (names.empty()) {
    names.push_back("step");
    for (const auto& c : kColumns) names.push_back(c.name);
  }
  std::vector<double Sample::*> members;
  for (const auto& n : names) members.push_back(n == "step" ? nullptr : sample_member(n));

  std::ostringstream out;
  out.precision(17);
  for (std::size_t k = 0; k < names.size(); ++k) out << (k ? "," : "") << names[k];
  out << '\n';
  for (const Sample& row : s.rows) {
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (k) out << ',';
      if (!members[k]) {
        out << row.step;
      } else if (!std::isnan(row.*members[k])) {
        out << row.*members[k];
      }
    }
    out << '\n';
  }
  return out.str();
}

TimeSeries parse_series_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::missing_series, "series csv: empty input");
  std::vector<std::string> names;
  {
    std::istringstream h(line);
    for (std::string cell; std::getline(h, cell, ',');) names.push_back(cell);
  }
  std::vector<double Sample::*> members;
  for (const auto& n : names) members.push_back(n == "step" ? nullptr : sample_member(n));

  TimeSeries s;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Sample row;
    std::istringstream r(line);
    std::size_t k = 0;
    for (std::string cell; k < names.size() && std::getline(r, cell, ','); ++k) {
      double x = kNaN;
      if (!cell.empty()) {
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
        if (ec != std::errc() || ptr != cell.data() + cell.size())
          throw ParseError("bad number '" + cell + "'", lineno, static_cast<int>(k) + 1);
      }
      if (members[k])
        row.*members[k] = x;
      else
        row.step = static_cast<long>(x);
    }
    // getline drops a trailing empty cell
    for (; k < names.size(); ++k)
      if (members[k]) row.*members[k] = kNaN;
    s.rows.push_back(row);
  }
  return s;
}

}  // namespace axbq
