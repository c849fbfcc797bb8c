#include "phenoid/automl/search.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <sstream>

#include "phenoid/automl/cv.h"
#include "phenoid/common/io.h"

namespace phenoid::automl {

namespace {

int IntPow(int base, int exp) {
  int v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

int MaxBracket(int max_resource, int eta) {
  int s = 0;
  while (IntPow(eta, s + 1) <= max_resource) ++s;
  return s;
}

bool Better(const TrialRecord& a, const TrialRecord& b) {
  const bool a_ok = !std::isnan(a.score), b_ok = !std::isnan(b.score);
  if (a_ok != b_ok) return a_ok;
  if (a_ok && a.score != b.score) return a.score > b.score;
  return a.config_id < b.config_id;
}

}  // namespace

bool TrialRecord::SameOutcome(const TrialRecord& o) const {
  const bool same_score = (std::isnan(score) && std::isnan(o.score)) || score == o.score;
  return trial_id == o.trial_id && config_id == o.config_id && bracket == o.bracket &&
         rung == o.rung && config == o.config && same_score && promoted == o.promoted &&
         note == o.note;
}

std::vector<int> BracketStartSizes(int max_resource, int eta) {
  const int s_max = MaxBracket(max_resource, eta);
  std::vector<int> sizes;
  for (int s = s_max; s >= 0; --s) {
    const int num = (s_max + 1) * IntPow(eta, s);
    sizes.push_back((num + s) / (s + 1));  // integer ceil(num / (s + 1))
  }
  return sizes;
}

SearchResult RunSearch(const SearchSpace& space, const features::FeatureMatrix& m,
                       std::span<const int> y, std::span<const std::string> allowed) {
  space.Validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  const int s_max = MaxBracket(space.max_resource, space.eta);
  const std::vector<int> start_sizes = BracketStartSizes(space.max_resource, space.eta);
  const uint64_t cv_seed = DeriveSeed(space.seed, "cv");
  Rng config_rng(DeriveSeed(space.seed, "configs"));

  SearchResult result;
  int next_config = 0;
  int next_trial = 0;
  for (int s = s_max; s >= 0 && !result.budget_exhausted; --s) {
    BracketSummary summary;
    summary.s = s;
    struct Candidate {
      int config_id;
      TrialConfig config;
    };
    std::vector<Candidate> alive;
    for (int i = 0; i < start_sizes[static_cast<size_t>(s_max - s)]; ++i) {
      Candidate c;
      c.config_id = next_config++;
      c.config.family = space.families[config_rng.Index(space.families.size())];
      auto fixed = space.fixed.find(c.config.family);
      c.config.hyperparameters = fixed != space.fixed.end()
                                     ? fixed->second
                                     : SampleHyperparameters(c.config.family, config_rng);
      c.config.k = space.k_grid[config_rng.Index(space.k_grid.size())];
      alive.push_back(std::move(c));
    }

    for (int rung = 0; rung <= s; ++rung) {
      const double resource = 1.0 / IntPow(space.eta, s - rung);
      std::vector<TrialRecord> records(alive.size());
      std::vector<char> ran(alive.size(), 0);
      std::exception_ptr fatal;
      const int base_trial = next_trial;
      next_trial += static_cast<int>(alive.size());
#pragma omp parallel for schedule(dynamic) if (space.pipeline.execution == Execution::kParallel)
      for (size_t i = 0; i < alive.size(); ++i) {
        if (elapsed() >= space.budget_seconds) continue;
        TrialRecord& rec = records[i];
        rec.trial_id = base_trial + static_cast<int>(i);
        rec.config_id = alive[i].config_id;
        rec.bracket = s;
        rec.rung = rung;
        rec.config = alive[i].config;
        rec.config.resource = resource;
        const auto t0 = Clock::now();
        PipelineOptions options = space.pipeline;
        options.execution = Execution::kSerial;  // parallelism lives at the trial level
        try {
          rec.score = CvScore(rec.config, m, y, allowed, space.folds, cv_seed, options).mean_auc;
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kInsufficientLabels) {
#pragma omp critical
            fatal = std::current_exception();
          }
          rec.score = std::numeric_limits<double>::quiet_NaN();
          rec.note = std::string("failed: ") + e.what();
        }
        rec.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        ran[i] = 1;
      }
      if (fatal) std::rethrow_exception(fatal);
      std::vector<TrialRecord> done;
      for (size_t i = 0; i < alive.size(); ++i) {
        if (ran[i]) done.push_back(records[i]);
      }
      if (done.size() < alive.size()) result.budget_exhausted = true;
      summary.rung_sizes.push_back(static_cast<int>(done.size()));
      summary.resource_used += static_cast<double>(done.size()) * resource * space.max_resource;
      if (result.budget_exhausted) {
        for (TrialRecord& r : done) result.history.push_back(std::move(r));
        break;
      }
      if (rung < s) {
        std::vector<size_t> order(done.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t b) { return Better(done[a], done[b]); });
        const size_t keep = std::max<size_t>(1, done.size() / static_cast<size_t>(space.eta));
        std::vector<Candidate> survivors;
        for (size_t k = 0; k < keep; ++k) {
          done[order[k]].promoted = true;
          for (const Candidate& c : alive) {
            if (c.config_id == done[order[k]].config_id) survivors.push_back(c);
          }
        }
        alive = std::move(survivors);
      }
      for (TrialRecord& r : done) result.history.push_back(std::move(r));
    }
    result.brackets.push_back(std::move(summary));
  }

  const TrialRecord* best = nullptr;
  for (const TrialRecord& r : result.history) {
    if (r.rung != r.bracket || std::isnan(r.score)) continue;
    if (!best || Better(r, *best)) best = &r;
  }
  if (!best) {
    if (result.budget_exhausted) {
      throw BudgetError("budget of " + FormatDouble(space.budget_seconds) +
                            " s exhausted before any full-resource trial finished",
                        result.history);
    }
    throw Error(ErrorCode::kFit, "every full-resource trial failed");
  }
  result.best = best->config;
  result.best_config_id = best->config_id;
  result.best_score = best->score;
  result.model = TrainedClassifier::Fit(m, y, result.best, allowed,
                                        DeriveSeed(space.seed, "final"), space.pipeline);
  return result;
}

std::string FormatSearchReport(const SearchResult& result) {
  std::ostringstream out;
  out << "trial config bracket rung resource score seconds promoted description\n";
  char buf[160];
  for (const TrialRecord& r : result.history) {
    std::snprintf(buf, sizeof(buf), "%5d %6d %7d %4d %8.4f %6.4f %7.2f %8s ", r.trial_id,
                  r.config_id, r.bracket, r.rung, r.config.resource, r.score, r.wall_seconds,
                  r.promoted ? "yes" : "no");
    out << buf << r.config.Describe();
    if (!r.note.empty()) out << " (" << r.note << ")";
    out << '\n';
  }
  out << "brackets:";
  for (const BracketSummary& b : result.brackets) {
    out << " s=" << b.s << " sizes=";
    for (size_t i = 0; i < b.rung_sizes.size(); ++i) {
      out << (i ? "/" : "") << b.rung_sizes[i];
    }
    out << " resource=" << FormatDouble(b.resource_used) << ';';
  }
  out << '\n';
  if (result.budget_exhausted) out << "budget exhausted before the schedule finished\n";
  std::snprintf(buf, sizeof(buf), "%.4f", result.best_score);
  out << "best config " << result.best_config_id << ": " << result.best.Describe()
      << " cv_auc=" << buf << '\n';
  return out.str();
}

nlohmann::json SearchResultToJson(const SearchResult& result) {
  nlohmann::json history = nlohmann::json::array();
  for (const TrialRecord& r : result.history) {
    history.push_back({{"trial_id", r.trial_id},
                       {"config_id", r.config_id},
                       {"bracket", r.bracket},
                       {"rung", r.rung},
                       {"config", r.config.ToJson()},
                       {"score", std::isnan(r.score) ? nlohmann::json(nullptr)
                                                     : nlohmann::json(r.score)},
                       {"wall_seconds", r.wall_seconds},
                       {"promoted", r.promoted},
                       {"note", r.note}});
  }
  nlohmann::json brackets = nlohmann::json::array();
  for (const BracketSummary& b : result.brackets) {
    brackets.push_back({{"s", b.s}, {"rung_sizes", b.rung_sizes}, {"resource", b.resource_used}});
  }
  return {{"best", result.best.ToJson()},
          {"best_config_id", result.best_config_id},
          {"best_score", result.best_score},
          {"budget_exhausted", result.budget_exhausted},
          {"brackets", brackets},
          {"history", history}};
}

}  // namespace phenoid::automl
