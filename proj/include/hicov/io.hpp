#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hicov/errors.hpp"
#include "hicov/harness.hpp"
#include "hicov/linalg.hpp"

namespace hicov {

class ParseError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Shortest round-trip decimal form; locale independent.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

// Headerless CSV, one observation per row (n rows x p columns). Blank lines
// are skipped; every row must have the same number of fields.
inline DataMatrix read_data_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      try {
        row.push_back(parse_double(rest.substr(0, comma)));
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(rows.front().size()) + " fields, got " +
                       std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw ParseError("data file needs at least 2 observations");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(rows.front().size());
  Matrix x(p, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < p; ++j) x(j, k) = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
  }
  return DataMatrix(std::move(x));
}

inline constexpr std::string_view kPowerCsvHeader =
    "grid_param,test,n,p,alpha,reps,reject_rate,mc_stderr,theory_power,seed";

// One row per (grid point, test).
inline void write_power_csv(std::ostream& out, const std::vector<PowerCurve>& curves) {
  out << kPowerCsvHeader << '\n';
  for (const auto& curve : curves) {
    const auto& cfg = curve.config;
    for (const auto& point : curve.points) {
      for (const auto& r : point.rates) {
        out << (point.grid_param ? format_number(*point.grid_param) : std::string()) << ','
            << test_name(r.test) << ',' << cfg.n << ',' << cfg.p << ','
            << format_number(cfg.alpha) << ',' << cfg.reps << ',' << format_number(r.rate) << ','
            << format_number(r.mc_stderr) << ','
            << (r.theory ? format_number(*r.theory) : std::string()) << ',' << cfg.seed << '\n';
      }
    }
  }
}

// Standalone matplotlib script with the CSV embedded: empirical rejection
// rates with +-2 stderr bars, theoretical power dashed, one panel per p.
inline void write_plot_script(std::ostream& out, const std::vector<PowerCurve>& curves,
                              std::string_view title, std::string_view image_path) {
  std::ostringstream csv;
  write_power_csv(csv, curves);
  out << "#!/usr/bin/env python3\n"
         "import csv, io\n"
         "from collections import defaultdict\n"
         "import matplotlib\n"
         "matplotlib.use('Agg')\n"
         "import matplotlib.pyplot as plt\n\n"
         "DATA = '''"
      << csv.str()
      << "'''\n\n"
         "rows = list(csv.DictReader(io.StringIO(DATA)))\n"
         "panels = sorted({int(r['p']) for r in rows})\n"
         "fig, axes = plt.subplots(1, len(panels), figsize=(6 * len(panels), 4.5), squeeze=False)\n"
         "for ax, p in zip(axes[0], panels):\n"
         "    series = defaultdict(list)\n"
         "    for r in rows:\n"
         "        if int(r['p']) == p and r['grid_param']:\n"
         "            series[r['test']].append(r)\n"
         "    for test, pts in sorted(series.items()):\n"
         "        pts.sort(key=lambda r: float(r['grid_param']))\n"
         "        x = [float(r['grid_param']) for r in pts]\n"
         "        y = [float(r['reject_rate']) for r in pts]\n"
         "        e = [2 * float(r['mc_stderr']) for r in pts]\n"
         "        line = ax.errorbar(x, y, yerr=e, marker='o', capsize=2, label=test + ' empirical')\n"
         "        th = [(float(r['grid_param']), float(r['theory_power'])) for r in pts if r['theory_power']]\n"
         "        if th:\n"
         "            ax.plot([a for a, _ in th], [b for _, b in th], '--',\n"
         "                    color=line[0].get_color(), label=test + ' theory')\n"
         "    ax.axhline(float(rows[0]['alpha']), color='grey', lw=0.8)\n"
         "    n = rows[0]['n']\n"
         "    ax.set_title(f'n={n}, p={p}')\n"
         "    ax.set_xlabel('grid parameter')\n"
         "    ax.set_ylabel('rejection rate')\n"
         "    ax.set_ylim(0, 1.02)\n"
         "    ax.legend()\n"
         "fig.suptitle('"
      << title
      << "')\n"
         "fig.tight_layout()\n"
         "fig.savefig('"
      << image_path << "', dpi=150)\n";
}

}  // namespace hicov
