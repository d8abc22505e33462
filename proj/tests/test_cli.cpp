// Exercises the installed CLI binary end to end: exit codes, emitted files,
// and the --compare mode.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

#define EXPECT(cond, msg)                                          \
  do {                                                             \
    if (!(cond)) {                                                 \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " \
                << msg << "\n";                                    \
      ++failures;                                                  \
    }                                                              \
  } while (0)

int run_cli(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = std::string(WFSIM_CLI_PATH) + " " + args;
  if (output == nullptr) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  }
  const fs::path tmp = fs::temp_directory_path() / "wfsim_cli_out.txt";
  const int status =
      std::system((cmd + " > " + tmp.string() + " 2>&1").c_str());
  std::ifstream in(tmp);
  std::ostringstream os;
  os << in.rdbuf();
  *output = os.str();
  fs::remove(tmp);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / "wfsim_cli_test";
  fs::remove_all(root);
  fs::create_directories(root);

  // Happy path: files land in --out.
  {
    const fs::path out = root / "run1";
    const int code = run_cli(
        "--policy aras --pattern constant --workflow montage --seed 7 --out " +
        out.string());
    EXPECT(code == 0, "default run exits 0");
    for (const char* name :
         {"summary.json", "series.csv", "events.log", "plot.csv"}) {
      EXPECT(fs::exists(out / name), std::string("missing ") + name);
    }
    const std::string series = slurp(out / "series.csv");
    EXPECT(series.rfind("t,cpu_used_m,mem_used_mi,cpu_cap_m,mem_cap_mi\n", 0) == 0,
           "series.csv header");
  }

  // Unknown flag values are usage errors.
  EXPECT(run_cli("--pattern hourly") == 2, "unknown pattern exits 2");
  EXPECT(run_cli("--policy greedy") == 2, "unknown policy exits 2");
  EXPECT(run_cli("--definitely-not-a-flag") == 2, "unknown flag exits 2");

  // Determinism across processes.
  {
    const fs::path out_a = root / "det_a";
    const fs::path out_b = root / "det_b";
    EXPECT(run_cli("--policy aras --pattern pyramid --workflow ligo --seed 42 "
                   "--out " + out_a.string()) == 0,
           "first deterministic run");
    EXPECT(run_cli("--policy aras --pattern pyramid --workflow ligo --seed 42 "
                   "--out " + out_b.string()) == 0,
           "second deterministic run");
    for (const char* name :
         {"summary.json", "series.csv", "events.log", "plot.csv"}) {
      EXPECT(slurp(out_a / name) == slurp(out_b / name),
             std::string(name) + " differs across identical runs");
    }
  }

  // --compare reports both policies over identical arrivals.
  {
    std::string output;
    const int code = run_cli(
        "--compare --pattern linear --workflow cybershake --seed 3 --out " +
            (root / "cmp").string(),
        &output);
    EXPECT(code == 0, "--compare exits 0");
    EXPECT(output.find("aras:") != std::string::npos, "compare prints aras");
    EXPECT(output.find("baseline:") != std::string::npos,
           "compare prints baseline");
    EXPECT(fs::exists(root / "cmp" / "aras" / "summary.json"),
           "compare writes aras output");
    EXPECT(fs::exists(root / "cmp" / "baseline" / "summary.json"),
           "compare writes baseline output");
  }

  // Workflow file ingestion: explicit tasks with dependencies.
  {
    const fs::path wf = root / "wf.json";
    std::ofstream(wf) << R"([{
      "workflow_id": "demo",
      "tasks": [
        {"id": "a", "cpu_m": 2000, "mem_mi": 4000, "min_cpu_m": 1000,
         "min_mem_mi": 1000, "duration_s": 10},
        {"id": "b", "deps": ["a"], "duration_s": 12},
        {"id": "c", "deps": ["a"], "duration_s": 14},
        {"id": "d", "deps": ["b", "c"], "duration_s": 10}
      ]
    }])";
    std::string output;
    const int code =
        run_cli("--workflow-file " + wf.string() + " --out " +
                    (root / "file_run").string(),
                &output);
    EXPECT(code == 0, "workflow file run exits 0");
    const std::string summary = slurp(root / "file_run" / "summary.json");
    EXPECT(summary.find("\"pattern\": \"file\"") != std::string::npos,
           "file-driven run is labelled");
  }

  // A workflow file with a cycle is rejected.
  {
    const fs::path wf = root / "cycle.json";
    std::ofstream(wf) << R"([{
      "tasks": [
        {"id": "a", "deps": ["c"]},
        {"id": "b", "deps": ["a"]},
        {"id": "c", "deps": ["b"]}
      ]
    }])";
    EXPECT(run_cli("--workflow-file " + wf.string()) == 1,
           "cyclic workflow file exits 1");
  }

  // Config file keys are honored, flags win.
  {
    const fs::path cfg = root / "run.cfg";
    std::ofstream(cfg) << "pattern=linear\nseed=5\nworkflow=epigenomics\n";
    std::string output;
    const int code = run_cli("--config " + cfg.string() + " --seed 9", &output);
    EXPECT(code == 0, "config file run exits 0");
  }

  // The knowledge-base snapshot is opt-in.
  {
    const fs::path out = root / "snap";
    EXPECT(run_cli("--seed 1 --kb-snapshot --out " + out.string()) == 0,
           "kb snapshot run exits 0");
    EXPECT(fs::exists(out / "kb_snapshot.log"), "kb_snapshot.log written");
    const std::string snap = slurp(out / "kb_snapshot.log");
    EXPECT(snap.find("flag=true") != std::string::npos,
           "snapshot holds completed records");
  }

  fs::remove_all(root);
  if (failures == 0) {
    std::cout << "cli tests passed\n";
    return 0;
  }
  std::cerr << failures << " cli test failure(s)\n";
  return 1;
}
