#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hicov/data_model.hpp"
#include "hicov/harness.hpp"
#include "hicov/io.hpp"
#include "hicov/statistics.hpp"

namespace hicov {

// A grid entry before the dimension is known.
struct GridEntry {
  enum class Kind { Identity, Rho, H };
  Kind kind;
  double value;

  CovarianceModel build(std::size_t p, std::size_t n) const {
    switch (kind) {
      case Kind::Identity:
        return CovarianceModel::identity(p);
      case Kind::Rho:
        return CovarianceModel::diagonal_spike(p, value);
      case Kind::H:
        return CovarianceModel::rank_one_spike(p, n, value);
    }
    throw InvalidInput("unknown grid entry");
  }
};

// "identity", "rho:0.25", "h:-1.5" or a bare number (rho).
inline GridEntry parse_grid_entry(std::string_view s) {
  s = trim(s);
  if (s == "identity" || s == "I") return {GridEntry::Kind::Identity, 1.0};
  if (s.starts_with("rho:")) return {GridEntry::Kind::Rho, parse_double(s.substr(4))};
  if (s.starts_with("h:")) return {GridEntry::Kind::H, parse_double(s.substr(2))};
  return {GridEntry::Kind::Rho, parse_double(s)};
}

inline std::uint64_t parse_u64(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("not a non-negative integer: '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

// A set of campaigns sharing everything except the dimension p.
struct CampaignPlan {
  std::string name = "custom";
  std::size_t n = 200;
  std::vector<std::size_t> dims = {50};
  double alpha = 0.05;
  std::size_t reps = 10000;
  InnovationLaw law = InnovationLaw::gaussian();
  MeanMode mean_mode = MeanMode::Zero;
  std::vector<TestKind> tests = {TestKind::Lrt};
  std::vector<GridEntry> grid = {{GridEntry::Kind::Identity, 1.0}};
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;

  std::vector<SimulationConfig> expand(std::uint64_t seed_value, unsigned workers_value) const {
    std::vector<SimulationConfig> out;
    for (std::size_t p : dims) {
      SimulationConfig cfg;
      cfg.n = n;
      cfg.p = p;
      cfg.alpha = alpha;
      cfg.reps = reps;
      cfg.law = law;
      cfg.mean_mode = mean_mode;
      cfg.tests = tests;
      for (const auto& g : grid) cfg.grid.push_back(g.build(p, n));
      cfg.seed = seed_value;
      cfg.workers = workers_value;
      cfg.validate();
      out.push_back(std::move(cfg));
    }
    return out;
  }
};

inline const std::vector<GridEntry>& spike_rho_grid() {
  static const std::vector<GridEntry> grid = [] {
    std::vector<GridEntry> g;
    for (double rho : {0.01, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0}) {
      g.push_back({GridEntry::Kind::Rho, rho});
    }
    return g;
  }();
  return grid;
}

// figure1: Gaussian, known zero mean, LRT vs CM. figure2: standardized
// Gamma(4, 0.5), fixed random mean, LRT vs CZZ. smoke: 100 replications.
inline std::optional<CampaignPlan> preset(std::string_view name) {
  CampaignPlan plan;
  plan.n = 200;
  plan.dims = {50, 100};
  plan.alpha = 0.05;
  plan.reps = 10000;
  plan.grid = spike_rho_grid();
  if (name == "figure1") {
    plan.name = "figure1";
    plan.law = InnovationLaw::gaussian();
    plan.mean_mode = MeanMode::Zero;
    plan.tests = {TestKind::Lrt, TestKind::Cm};
    return plan;
  }
  if (name == "figure2") {
    plan.name = "figure2";
    plan.law = InnovationLaw::standardized_gamma(4.0, 0.5);
    plan.mean_mode = MeanMode::RandomFixed;
    plan.tests = {TestKind::Lrt, TestKind::Czz};
    return plan;
  }
  if (name == "smoke") {
    plan.name = "smoke";
    plan.dims = {50};
    plan.reps = 100;
    plan.tests = {TestKind::Lrt, TestKind::Cm, TestKind::Czz};
    plan.grid = {{GridEntry::Kind::Rho, 0.25}, {GridEntry::Kind::Identity, 1.0},
                 {GridEntry::Kind::Rho, 3.0}};
    return plan;
  }
  return std::nullopt;
}

// Applies key=value settings in order. Within one parser, the first `p` or
// `grid` key replaces the current list and later ones append.
class PlanBuilder {
 public:
  explicit PlanBuilder(CampaignPlan plan = {}) : plan_(std::move(plan)) {}

  void set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "preset") {
      auto p = preset(value);
      if (!p) throw ParseError("unknown preset '" + std::string(value) + "'");
      plan_ = *p;
      seen_.clear();
    } else if (key == "n") {
      plan_.n = static_cast<std::size_t>(parse_u64(value));
    } else if (key == "p") {
      if (seen_.insert("p").second) plan_.dims.clear();
      for (auto item : split_list(value)) plan_.dims.push_back(static_cast<std::size_t>(parse_u64(item)));
    } else if (key == "alpha") {
      plan_.alpha = parse_double(value);
    } else if (key == "reps") {
      plan_.reps = static_cast<std::size_t>(parse_u64(value));
    } else if (key == "law") {
      if (value == "gaussian") {
        plan_.law = InnovationLaw::gaussian();
      } else if (value == "gamma") {
        plan_.law = InnovationLaw::standardized_gamma(4.0, 0.5);
      } else {
        throw ParseError("law must be 'gaussian' or 'gamma'");
      }
    } else if (key == "mean") {
      if (value == "zero") {
        plan_.mean_mode = MeanMode::Zero;
      } else if (value == "random") {
        plan_.mean_mode = MeanMode::RandomFixed;
      } else {
        throw ParseError("mean must be 'zero' or 'random'");
      }
    } else if (key == "tests") {
      plan_.tests.clear();
      for (auto item : split_list(value)) {
        auto kind = parse_test_kind(item);
        if (!kind) throw ParseError("unknown test '" + std::string(item) + "'");
        plan_.tests.push_back(*kind);
      }
    } else if (key == "grid") {
      if (seen_.insert("grid").second) plan_.grid.clear();
      for (auto item : split_list(value)) plan_.grid.push_back(parse_grid_entry(item));
    } else if (key == "seed") {
      plan_.seed = parse_u64(value);
    } else if (key == "workers") {
      plan_.workers = static_cast<unsigned>(parse_u64(value));
    } else if (key == "name") {
      plan_.name = std::string(value);
    } else {
      throw ParseError("unknown key '" + std::string(key) + "'");
    }
  }

  const CampaignPlan& plan() const noexcept { return plan_; }

 private:
  CampaignPlan plan_;
  std::set<std::string> seen_;
};

// Flat key=value text; '#' starts a comment.
inline CampaignPlan parse_config(std::istream& in, CampaignPlan base = {}) {
  PlanBuilder builder(std::move(base));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": expected key=value");
    }
    try {
      builder.set(view.substr(0, eq), view.substr(eq + 1));
    } catch (const InvalidInput& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return builder.plan();
}

}  // namespace hicov
