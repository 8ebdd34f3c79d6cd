#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mm/core/parser.hpp"
#include "mm/core/wire.hpp"
#include "mm/gateway/api.hpp"
#include "mm/study/analysis.hpp"
#include "mm/tree/ted.hpp"

using namespace mm;
using nlohmann::json;

namespace {

std::string read_text(const std::string& file) {
  if (file == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(file);
  if (!in) throw Error("cannot read " + file);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Program read_program(const std::string& file) {
  try {
    return parse_program(read_text(file));
  } catch (const ParseError& e) {
    throw Error(file + ":" + e.what());
  }
}

json program_json(const Program& p) { return {{"ast", to_wire(p)}, {"text", serialize_program(p)}}; }

void write_file(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << text;
}

Gateway* g_gateway = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maze-mentor: block-based maze programs, hints, quizzes and study analysis"};
  app.require_subcommand(1);
  std::string data_dir = default_data_dir().string();
  std::string catalog_dir;
  app.add_option("--data", data_dir, "data directory (catalog/, quizzes/, study.json)");
  app.add_option("--catalog", catalog_dir, "task catalog directory (default: <data>/catalog)");
  auto catalog = [&] { return load_task_catalog(catalog_dir.empty() ? std::filesystem::path(data_dir) / "catalog" : std::filesystem::path(catalog_dir)); };

  std::string task_id, program_file, attempt_file;
  bool as_json = false;

  auto* run = app.add_subcommand("run", "execute a program on a task grid");
  run->add_option("--task", task_id, "task id")->required();
  run->add_option("--program", program_file, "program file, - for stdin")->required();
  run->add_flag("--json", as_json, "print the wire AST and full trace as JSON");

  auto* hint = app.add_subcommand("hint", "next-step code recommendation for an attempt");
  hint->add_option("--task", task_id, "task id")->required();
  hint->add_option("--attempt", attempt_file, "attempt file, - for stdin")->required();
  hint->add_flag("--json", as_json, "print the recommendation payload as JSON");

  std::string quiz_kind = "code", stage = "planning";
  auto* quiz = app.add_subcommand("quiz", "build a code quiz or show a plan quiz");
  quiz->add_option("--task", task_id, "task id")->required();
  quiz->add_option("--attempt", attempt_file, "attempt file (code quizzes)");
  quiz->add_option("--kind", quiz_kind, "code or plan")->check(CLI::IsMember({"code", "plan"}));
  quiz->add_option("--stage", stage, "plan quiz stage")->check(CLI::IsMember({"planning", "solution_finding"}));
  quiz->add_flag("--json", as_json, "print the payload as JSON");

  std::vector<std::string> ted_files;
  auto* ted_cmd = app.add_subcommand("ted", "tree edit distance between two programs");
  ted_cmd->add_option("files", ted_files, "two program files")->required()->expected(2);

  std::string config_file, out_dir = "logs";
  std::optional<std::uint64_t> seed;
  std::optional<int> students;
  unsigned threads = 0;
  auto* simulate = app.add_subcommand("simulate", "simulate the two-phase study and write session logs");
  simulate->add_option("--config", config_file, "simulation config (default: <data>/study.json)");
  simulate->add_option("--seed", seed, "override the config seed");
  simulate->add_option("--students", students, "override students per group");
  simulate->add_option("--threads", threads, "worker threads, 0 = all cores");
  simulate->add_option("--out", out_dir, "log directory");

  std::string logs_dir;
  std::vector<std::string> reports;
  bool check_patterns = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "statistics report over session logs");
  analyze_cmd->add_option("--logs", logs_dir, "log directory")->required();
  analyze_cmd->add_option("--report", reports, "report file(s): .json or .md; stdout markdown when absent");
  analyze_cmd->add_flag("--check-patterns", check_patterns, "also check the calibrated result patterns");

  std::optional<int> port;
  std::string log_dir;
  auto* serve = app.add_subcommand("serve", "run the HTTP API (MM_PORT, MM_CATALOG, MM_LOG_DIR)");
  serve->add_option("--port", port, "port, overrides MM_PORT");
  serve->add_option("--logs", log_dir, "event log directory, overrides MM_LOG_DIR");

  auto* check = app.add_subcommand("catalog-check", "validate the task catalog");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const TaskCatalog cat = catalog();
      const TaskSpec& t = cat.at(task_id);
      const Program p = read_program(program_file);
      const ExecutionResult r = execute(p, t.grid);
      const auto violations = validate_program(p, t);
      if (as_json) {
        json trace = json::array();
        for (const TraceEntry& e : r.trace)
          trace.push_back({{"action", keyword(e.action)}, {"row", e.pose.cell.row}, {"col", e.pose.cell.col},
                           {"dir", keyword(e.pose.dir)}});
        json v = json::array();
        for (const auto& x : violations) v.push_back(x.message);
        std::cout << json{{"task", t.id},
                          {"program", program_json(p)},
                          {"outcome", keyword(r.outcome)},
                          {"steps", r.steps},
                          {"trace", trace},
                          {"violations", v},
                          {"solution", r.success() && violations.empty()}}
                         .dump(2)
                  << '\n';
      } else {
        const Pose end = r.final_pose(t.grid);
        std::cout << "outcome: " << keyword(r.outcome) << "\nsteps: " << r.steps << "\nfinal: (" << end.cell.row
                  << ", " << end.cell.col << ") " << keyword(end.dir) << '\n';
        for (const auto& x : violations) std::cout << "violation: " << x.message << '\n';
      }
    } else if (*hint) {
      const TaskCatalog cat = catalog();
      const TaskSpec& t = cat.at(task_id);
      const Program attempt = read_program(attempt_file);
      const Recommendation rec = recommend(attempt, t.solution, t.palette);
      if (as_json)
        std::cout << to_json(render_recommendation(rec, attempt)).dump(2) << '\n';
      else
        std::cout << serialize_program(rec.c_rec) << "# distance to solution: " << rec.distance_to_solution
                  << (rec.via_fallback ? " (fallback)" : "") << '\n';
    } else if (*quiz) {
      const TaskCatalog cat = catalog();
      const TaskSpec& t = cat.at(task_id);
      json payload;
      if (quiz_kind == "plan") {
        const PlanQuizBank bank = PlanQuizBank::load(std::filesystem::path(data_dir) / "quizzes");
        const PlanQuiz& q = bank.get(t.id, stage == "planning" ? PlanStage::Planning : PlanStage::SolutionFinding);
        payload = to_json(q);
        payload["correct_index"] = q.correct_index;
      } else {
        if (attempt_file.empty()) throw Error("--attempt is required for code quizzes");
        auto content = FeedbackContent::load(data_dir);
        const CodeQuiz q = content->services().code_quizzes->build(read_program(attempt_file), t);
        payload = to_json(q);
        payload["correct_action"] = keyword(q.blanked.correct_action);
      }
      if (as_json) {
        std::cout << payload.dump(2) << '\n';
      } else if (quiz_kind == "plan") {
        std::cout << payload["prompt"].get<std::string>() << '\n';
        for (std::size_t i = 0; i < payload["options"].size(); ++i)
          std::cout << "  " << i << ") " << payload["options"][i].dump() << '\n';
      } else {
        std::cout << payload["template"]["text"].get<std::string>() << "grid:\n";
        for (const auto& row : payload["grid"]["rows"]) std::cout << "  " << row.get<std::string>() << '\n';
        std::cout << "start facing " << payload["grid"]["start_dir"].get<std::string>()
                  << "\nanswer: " << payload["correct_action"].get<std::string>() << '\n';
      }
    } else if (*ted_cmd) {
      std::cout << ted(read_program(ted_files[0]), read_program(ted_files[1])) << '\n';
    } else if (*simulate) {
      const TaskCatalog cat = catalog();
      SimulationConfig cfg =
          SimulationConfig::load(config_file.empty() ? std::filesystem::path(data_dir) / "study.json" : std::filesystem::path(config_file));
      if (seed) cfg.seed = *seed;
      if (students) cfg.students_per_group = *students;
      auto content = FeedbackContent::load(data_dir);
      const auto logs = simulate_study(cfg, cat, content->services(), threads);
      write_study_logs(logs, out_dir);
      std::cout << "wrote " << logs.size() * 2 << " session logs for " << logs.size() << " students to " << out_dir
                << '\n';
    } else if (*analyze_cmd) {
      const TaskCatalog cat = catalog();
      const json report = analyze(load_dataset(logs_dir, cat), cat);
      if (reports.empty()) std::cout << render_report_markdown(report);
      for (const std::string& r : reports) {
        const std::filesystem::path file(r);
        if (file.extension() == ".json")
          write_file(file, report.dump(2) + "\n");
        else if (file.extension() == ".md")
          write_file(file, render_report_markdown(report));
        else
          throw Error("report file must end in .json or .md: " + r);
        std::cout << "wrote " << r << '\n';
      }
      if (check_patterns) {
        bool all = true;
        for (const PatternCheck& p : check_study_patterns(report)) {
          std::cout << (p.passed ? "PASS " : "FAIL ") << p.name << " (" << p.detail << ")\n";
          all = all && p.passed;
        }
        if (!all) return 1;
      }
    } else if (*serve) {
      GatewayConfig cfg = GatewayConfig::from_env();
      cfg.data_dir = data_dir;
      if (!catalog_dir.empty()) cfg.catalog_dir = catalog_dir;
      if (port) cfg.port = *port;
      if (!log_dir.empty()) cfg.log_dir = std::filesystem::path(log_dir);
      Gateway gw(cfg);
      const int bound = gw.bind();
      std::cout << "listening on " << cfg.host << ':' << bound << " (" << gw.restored() << " sessions restored)"
                << std::endl;
      g_gateway = &gw;
      std::signal(SIGINT, [](int) { g_gateway->stop(); });
      std::signal(SIGTERM, [](int) { g_gateway->stop(); });
      gw.listen();
    } else if (*check) {
      const TaskCatalog cat = catalog();
      check_catalog(cat.tasks());
      std::cout << cat.tasks().size() << " tasks OK\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "maze-mentor: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
