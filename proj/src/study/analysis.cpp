#include "mm/study/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "mm/session/store.hpp"

namespace mm {

using nlohmann::json;

namespace {

void add_session(StudyDataset& d, std::map<std::string, std::pair<Group, std::size_t>>& index, const Session& s) {
  auto it = index.find(s.pseudonym());
  if (it == index.end()) {
    auto& rows = d.groups[s.group()];
    rows.push_back({s.pseudonym(), s.group(), std::nullopt, std::nullopt});
    it = index.emplace(s.pseudonym(), std::make_pair(s.group(), rows.size() - 1)).first;
  }
  if (it->second.first != s.group())
    throw Error("student " + s.pseudonym() + " appears in two groups");
  StudentRecord& r = d.groups[s.group()][it->second.second];
  (s.phase() == Phase::Learning ? r.learning : r.post_learning) = s.metrics();
}

void sort_records(StudyDataset& d) {
  for (auto& [g, rows] : d.groups)
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.pseudonym < b.pseudonym; });
}

}  // namespace

StudyDataset dataset_from_logs(const std::vector<std::vector<SessionEvent>>& logs, const TaskCatalog& catalog) {
  StudyDataset d;
  std::map<std::string, std::pair<Group, std::size_t>> index;
  for (const auto& events : logs) add_session(d, index, Session::replay(events, catalog));
  sort_records(d);
  return d;
}

StudyDataset dataset_from_logs(const std::vector<StudentLog>& logs, const TaskCatalog& catalog) {
  std::vector<std::vector<SessionEvent>> all;
  for (const StudentLog& s : logs) {
    all.push_back(s.learning.events);
    all.push_back(s.post_learning.events);
  }
  return dataset_from_logs(all, catalog);
}

StudyDataset load_dataset(const std::filesystem::path& dir, const TaskCatalog& catalog) {
  if (!std::filesystem::is_directory(dir)) throw Error("log directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::vector<SessionEvent>> logs;
  for (const auto& f : files) logs.push_back(read_event_log(f));
  return dataset_from_logs(logs, catalog);
}

std::vector<TaskSlice> task_slices(const TaskCatalog& catalog) {
  std::vector<TaskSlice> out;
  auto ids = [&](Phase ph, const std::function<bool(const TaskSpec&)>& keep) {
    std::vector<std::string> v;
    for (const TaskSpec* t : catalog.curriculum(ph))
      if (keep(*t)) v.push_back(t->id);
    return v;
  };
  auto all = [](const TaskSpec&) { return true; };
  auto diff = [](Difficulty d) { return [d](const TaskSpec& t) { return t.difficulty == d; }; };
  auto novelty = [](Novelty n) { return [n](const TaskSpec& t) { return t.novelty == n; }; };

  std::set<std::string> common_pl;
  for (const TaskSpec* t : catalog.curriculum(Phase::PostLearning))
    if (t->novelty == Novelty::CommonPL) common_pl.insert(t->id);
  std::set<std::string> common_l;
  for (const auto& [post, learn] : duplicate_pairs())
    if (common_pl.contains(post)) common_l.insert(learn);

  out.push_back({"HoC", "HoC (T01-T12)", ids(Phase::Learning, all)});
  out.push_back({"Easy_L", "Easy_L", ids(Phase::Learning, diff(Difficulty::EasyL))});
  out.push_back({"Hard_L", "Hard_L", ids(Phase::Learning, diff(Difficulty::HardL))});
  out.push_back({"Common_L", "Common_L", ids(Phase::Learning, [&](const TaskSpec& t) { return common_l.contains(t.id); })});
  out.push_back({"PostHoC", "PostHoC (P01-P15)", ids(Phase::PostLearning, all)});
  out.push_back({"Easy_PL", "Easy_PL", ids(Phase::PostLearning, diff(Difficulty::EasyPL))});
  out.push_back({"Hard_PL", "Hard_PL", ids(Phase::PostLearning, diff(Difficulty::HardPL))});
  out.push_back({"Common_PL", "Common_PL", ids(Phase::PostLearning, novelty(Novelty::CommonPL))});
  out.push_back({"New_PL", "New_PL", ids(Phase::PostLearning, novelty(Novelty::NewPL))});
  for (const char* id : {"P12", "P13", "P14"}) out.push_back({id, id, {id}});
  return out;
}

const TaskSlice& task_slice(const std::vector<TaskSlice>& slices, std::string_view id) {
  for (const TaskSlice& s : slices)
    if (s.id == id) return s;
  throw Error("unknown task slice " + std::string(id));
}

std::optional<double> success_rate(const SessionMetrics& m, const TaskSlice& slice) {
  int n = 0, solved = 0;
  for (const TaskMetrics& t : m.tasks)
    if (std::find(slice.task_ids.begin(), slice.task_ids.end(), t.task_id) != slice.task_ids.end()) {
      ++n;
      solved += t.solved ? 1 : 0;
    }
  if (n == 0) return std::nullopt;
  return 100.0 * solved / n;
}

namespace {

using Extract = std::function<std::optional<double>(const StudentRecord&)>;

struct ColumnSpec {
  std::string id;
  std::string label;
  Extract value;
  Group reference = Group::None;
  std::set<Group> groups = {std::begin(kAllGroups), std::end(kAllGroups)};
};

std::string stars(const StatResult& r) {
  if (r.highly_significant) return "**";
  if (r.significant) return "*";
  return "";
}

json column_report(const StudyDataset& d, const ColumnSpec& c) {
  std::map<Group, std::vector<double>> values;
  std::vector<double> pooled;
  std::vector<std::vector<double>> samples;
  for (Group g : kAllGroups) {
    if (!c.groups.contains(g)) continue;
    for (const StudentRecord& r : d.groups.at(g))
      if (auto v = c.value(r)) values[g].push_back(*v);
    if (!values[g].empty()) {
      pooled.insert(pooled.end(), values[g].begin(), values[g].end());
      samples.push_back(values[g]);
    }
  }
  json col = {{"id", c.id}, {"label", c.label}, {"reference", keyword(c.reference)}};
  try {
    col["normality"] = to_json(shapiro_wilk(pooled));
  } catch (const StatsError& e) {
    col["normality"] = {{"test", "shapiro_wilk"}, {"error", e.what()}};
  }
  try {
    col["omnibus"] = to_json(kruskal_wallis(samples));
  } catch (const StatsError& e) {
    col["omnibus"] = {{"test", "kruskal_wallis"}, {"error", e.what()}};
  }
  json cells = json::array();
  for (Group g : kAllGroups) {
    json cell = {{"group", keyword(g)}};
    if (!c.groups.contains(g) || values[g].empty()) {
      cell["applicable"] = false;
      cells.push_back(cell);
      continue;
    }
    const auto& v = values[g];
    cell["applicable"] = true;
    cell["n"] = v.size();
    cell["mean"] = mean(v);
    cell["se"] = standard_error(v);
    cell["stars"] = "";
    if (g != c.reference && !values[c.reference].empty()) {
      StatResult u = mann_whitney_u(v, values[c.reference]);
      cell["mann_whitney"] = to_json(u);
      cell["stars"] = stars(u);
      try {
        cell["cohens_d"] = cohens_d(v, values[c.reference]).statistic;
      } catch (const StatsError&) {
        cell["cohens_d"] = nullptr;
      }
    }
    cells.push_back(cell);
  }
  col["cells"] = cells;
  return col;
}

Extract rate_of(const TaskSlice& slice, bool learning) {
  return [slice, learning](const StudentRecord& r) -> std::optional<double> {
    const auto& m = learning ? r.learning : r.post_learning;
    return m ? success_rate(*m, slice) : std::nullopt;
  };
}

Extract per_task(double (*f)(const SessionMetrics&)) {
  return [f](const StudentRecord& r) -> std::optional<double> {
    if (!r.learning || r.learning->tasks.empty()) return std::nullopt;
    return f(*r.learning);
  };
}

}  // namespace

json analyze(const StudyDataset& dataset, const TaskCatalog& catalog) {
  for (Group g : kAllGroups)
    if (!dataset.groups.contains(g) || dataset.groups.at(g).empty())
      throw Error("analyze: group " + std::string(keyword(g)) + " is missing from the dataset");
  const auto slices = task_slices(catalog);
  auto rate = [&](const char* id, bool learning) {
    const TaskSlice& s = task_slice(slices, id);
    return ColumnSpec{s.id, s.label, rate_of(s, learning)};
  };
  const std::set<Group> intervention = {Group::CodeRec, Group::CodeQuiz, Group::PlanQuiz};

  struct TableSpec {
    std::string id, title, unit;
    std::vector<ColumnSpec> columns;
  };
  std::vector<TableSpec> tables;
  tables.push_back({"learning_success", "Learning phase: success rate on write-code tasks", "%",
                    {rate("HoC", true), rate("Easy_L", true), rate("Hard_L", true), rate("Common_L", true)}});
  tables.push_back(
      {"learning_time", "Learning phase: time on tasks and intervention", "",
       {ColumnSpec{"time_on_task", "Time on task (s)",
                   per_task([](const SessionMetrics& m) { return m.mean_time_per_task; })},
        ColumnSpec{"intervention_time", "Intervention time (s)",
                   per_task([](const SessionMetrics& m) { return m.time_on_intervention / double(m.tasks.size()); }),
                   Group::CodeRec, intervention},
        ColumnSpec{"intervention_rate", "Intervention rate",
                   per_task([](const SessionMetrics& m) { return m.intervention_rate; }), Group::CodeRec,
                   intervention}}});
  tables.push_back({"post_success", "Post-learning phase: success rate by difficulty", "%",
                    {rate("PostHoC", false), rate("Easy_PL", false), rate("Hard_PL", false)}});
  tables.push_back({"post_novelty", "Post-learning phase: success rate by novelty", "%",
                    {rate("Common_PL", false), rate("New_PL", false), rate("P12", false), rate("P13", false),
                     rate("P14", false)}});

  json report;
  report["baseline"] = keyword(Group::None);
  report["alpha"] = {{"significant", kAlphaSignificant}, {"highly_significant", kAlphaHighlySignificant}};
  json groups = json::array();
  for (Group g : kAllGroups) groups.push_back({{"group", keyword(g)}, {"n", dataset.groups.at(g).size()}});
  report["groups"] = groups;
  json out = json::array();
  for (const TableSpec& t : tables) {
    json cols = json::array();
    for (const ColumnSpec& c : t.columns) cols.push_back(column_report(dataset, c));
    out.push_back({{"id", t.id}, {"title", t.title}, {"unit", t.unit}, {"columns", cols}});
  }
  report["tables"] = out;
  return report;
}

namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_p(const json& p) {
  if (p.is_null()) return "-";
  const double v = p.get<double>();
  if (v < 1e-4) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", v);
    return buf;
  }
  return fmt(v, 4);
}

}  // namespace

std::string render_report_markdown(const json& report) {
  std::ostringstream os;
  os << "# Study report\n\n";
  os << "Baseline: " << report.at("baseline").get<std::string>() << ". Pairwise Mann-Whitney U against the "
     << "column's reference group; `*` p < 0.05/3, `**` p < 0.01/3. Cells are mean (SE).\n\n";
  os << "| Group | n |\n|---|---|\n";
  for (const json& g : report.at("groups")) os << "| " << g.at("group").get<std::string>() << " | " << g.at("n") << " |\n";
  for (const json& t : report.at("tables")) {
    os << "\n## " << t.at("title").get<std::string>() << "\n\n| Group |";
    const json& cols = t.at("columns");
    for (const json& c : cols) os << ' ' << c.at("label").get<std::string>() << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < cols.size(); ++i) os << "---|";
    os << '\n';
    const std::size_t rows = cols.at(0).at("cells").size();
    for (std::size_t r = 0; r < rows; ++r) {
      os << "| " << cols.at(0).at("cells").at(r).at("group").get<std::string>() << " |";
      for (const json& c : cols) {
        const json& cell = c.at("cells").at(r);
        if (!cell.at("applicable").get<bool>()) {
          os << " - |";
          continue;
        }
        const int digits = c.at("id") == "intervention_rate" ? 2 : 1;
        os << ' ' << fmt(cell.at("mean").get<double>(), digits) << " (" << fmt(cell.at("se").get<double>(), digits + 1)
           << ")" << cell.at("stars").get<std::string>() << " |";
      }
      os << '\n';
    }
    os << '\n';
    for (const json& c : cols) {
      os << "- " << c.at("label").get<std::string>() << ": ";
      const json& kw = c.at("omnibus");
      if (kw.contains("error"))
        os << "Kruskal-Wallis n/a";
      else
        os << "Kruskal-Wallis H = " << fmt(kw.at("statistic").get<double>(), 3) << ", p = " << fmt_p(kw.at("p_value"));
      const json& sw = c.at("normality");
      if (sw.contains("error"))
        os << "; Shapiro-Wilk n/a";
      else
        os << "; Shapiro-Wilk W = " << fmt(sw.at("statistic").get<double>(), 3) << ", p = " << fmt_p(sw.at("p_value"));
      for (const json& cell : c.at("cells")) {
        if (!cell.contains("mann_whitney")) continue;
        os << "; " << cell.at("group").get<std::string>() << " vs " << c.at("reference").get<std::string>()
           << ": p = " << fmt_p(cell.at("mann_whitney").at("p_value"));
        if (!cell.at("cohens_d").is_null()) os << ", d = " << fmt(cell.at("cohens_d").get<double>(), 2);
      }
      os << '\n';
    }
  }
  return os.str();
}

namespace {

const json& column(const json& report, std::string_view table, std::string_view col) {
  for (const json& t : report.at("tables"))
    if (t.at("id") == table)
      for (const json& c : t.at("columns"))
        if (c.at("id") == col) return c;
  throw Error("report has no column " + std::string(table) + "/" + std::string(col));
}

const json& cell(const json& col, Group g) {
  for (const json& c : col.at("cells"))
    if (c.at("group") == keyword(g)) return c;
  throw Error("report column has no group " + std::string(keyword(g)));
}

double mean_of(const json& col, Group g) { return cell(col, g).at("mean").get<double>(); }

}  // namespace

std::vector<PatternCheck> check_study_patterns(const json& report) {
  std::vector<PatternCheck> out;
  const Group treated[] = {Group::CodeRec, Group::CodeQuiz, Group::PlanQuiz};
  {
    const json& c = column(report, "learning_success", "HoC");
    PatternCheck p{"learning success: every intervention group significantly above None, CodeRec highest", true, ""};
    std::ostringstream d;
    d << "None " << fmt(mean_of(c, Group::None), 1);
    for (Group g : treated) {
      const json& x = cell(c, g);
      const bool sig = x.at("mann_whitney").at("significant").get<bool>();
      d << ", " << keyword(g) << ' ' << fmt(x.at("mean").get<double>(), 1) << x.at("stars").get<std::string>();
      if (!(x.at("mean").get<double>() > mean_of(c, Group::None)) || !sig) p.passed = false;
      if (g != Group::CodeRec && !(mean_of(c, Group::CodeRec) > x.at("mean").get<double>())) p.passed = false;
    }
    p.detail = d.str();
    out.push_back(p);
  }
  {
    const json& c = column(report, "learning_time", "time_on_task");
    const double none = mean_of(c, Group::None), rec = mean_of(c, Group::CodeRec);
    out.push_back({"time on task: CodeRec below None", rec < none,
                   "None " + fmt(none, 1) + " s, CodeRec " + fmt(rec, 1) + " s"});
  }
  {
    const json& c = column(report, "post_success", "PostHoC");
    PatternCheck p{"post-learning success: no significant group differences", true, ""};
    std::ostringstream d;
    const json& kw = c.at("omnibus");
    const double kw_p = kw.contains("p_value") ? kw.at("p_value").get<double>() : 1.0;
    if (kw_p < 0.05) p.passed = false;
    d << "Kruskal-Wallis p " << fmt_p(kw_p);
    for (Group g : treated) {
      const json& x = cell(c, g);
      if (x.at("mann_whitney").at("significant").get<bool>()) p.passed = false;
      d << ", " << keyword(g) << " p " << fmt_p(x.at("mann_whitney").at("p_value"));
    }
    p.detail = d.str();
    out.push_back(p);
  }
  {
    const json& c = column(report, "post_novelty", "New_PL");
    const double none = mean_of(c, Group::None), cq = mean_of(c, Group::CodeQuiz), pq = mean_of(c, Group::PlanQuiz);
    out.push_back({"New_PL success: quiz groups above None", cq > none && pq > none,
                   "None " + fmt(none, 1) + ", CodeQuiz " + fmt(cq, 1) + ", PlanQuiz " + fmt(pq, 1)});
  }
  return out;
}

}  // namespace mm
