#include <sys/wait.h>

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "sopeval/embedding.hpp"
#include "sopeval/evaluation.hpp"
#include "sopeval/service.hpp"
#include "support.hpp"

using namespace sopeval;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs the CLI with `args`, capturing stdout and stderr into `dir`.
int run(const fs::path& dir, const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" SOPEVAL_CLI "' " + args + " > '" +
                          (dir / "stdout.txt").string() + "' 2> '" + (dir / "stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// Synthetic corpus and embeddings written once per process.
const fs::path& workspace() {
  static const fs::path dir = [] {
    auto d = testing::scratch_dir("cli");
    REQUIRE(run(d, "synth --out '" + d.string() + "' --seed 1") == 0);
    return d;
  }();
  return dir;
}

std::string data_flags() {
  const auto& d = workspace();
  return "--corpus '" + (d / "corpus.jsonl").string() + "' --embeddings '" + (d / "embeddings.txt").string() + "'";
}

}  // namespace

TEST_CASE("synth writes a 50-document corpus and its embeddings") {
  const auto& d = workspace();
  const auto corpus = load_corpus(d / "corpus.jsonl");
  CHECK(corpus.size() == 50);
  CHECK(embedding::load_embeddings(d / "embeddings.txt", 300)->dimension() == 300);
}

TEST_CASE("train then predict prints a label and the breakdown") {
  const auto& d = workspace();
  const auto model = d / "svm.json";
  REQUIRE(run(d, "train " + data_flags() + " --model svm --out '" + model.string() + "'") == 0);
  CHECK(slurp(d / "stdout.txt").find("model svm-") != std::string::npos);

  std::ofstream(d / "essay.txt") << load_corpus(d / "corpus.jsonl")[2].text;
  const auto emb = "--embeddings '" + (d / "embeddings.txt").string() + "'";
  REQUIRE(run(d, "predict --model '" + model.string() + "' --essay '" + (d / "essay.txt").string() + "' " + emb) == 0);
  const auto text = slurp(d / "stdout.txt");
  CHECK(text.find("accepted") != std::string::npos);
  CHECK(text.find("cosine_reference") != std::string::npos);
  CHECK(text.find("we_000") != std::string::npos);

  SUBCASE("CLI predict and HTTP evaluate agree") {
    REQUIRE(run(d, "predict --json --model '" + model.string() + "' --essay '" + (d / "essay.txt").string() + "' " +
                       emb) == 0);
    const auto cli = json::parse(slurp(d / "stdout.txt"));

    service::EvaluationService svc;
    const auto loaded = std::make_shared<const TrainedModel>(load_model(model));
    const auto table = embedding::load_embeddings(d / "embeddings.txt", 300);
    svc.install(loaded, {testing::bundled_lexicon(), table, table});
    httplib::Server server;
    service::register_routes(server, svc);
    const int port = server.bind_to_any_port("127.0.0.1");
    std::jthread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    auto r = client.Post("/v1/evaluate", json{{"text", slurp(d / "essay.txt")}}.dump(), "application/json");
    server.stop();
    REQUIRE(r);
    const auto http = json::parse(r->body);
    CHECK(http["label"] == cli["label"]);
    CHECK(std::abs(http["decision_value"].get<double>() - cli["decision_value"].get<double>()) <= 1e-12);
    CHECK(http["model_id"] == cli["model_id"]);
    CHECK(http["feature_breakdown"] == cli["feature_breakdown"]);
  }
}

TEST_CASE("predict takes the model path from MODEL_PATH") {
  const auto& d = workspace();
  const auto model = d / "lr.json";
  REQUIRE(run(d, "train " + data_flags() + " --model lr --features SE --out '" + model.string() + "'") == 0);
  std::ofstream(d / "essay2.txt") << "My research goals are clear. I will study science.";
  CHECK(run(d, "predict --essay '" + (d / "essay2.txt").string() + "' --embeddings '" +
                   (d / "embeddings.txt").string() + "'",
            "MODEL_PATH='" + model.string() + "'") == 0);
  CHECK(slurp(d / "stdout.txt").find("decision") != std::string::npos);
}

TEST_CASE("cv twice with the same seed writes byte-identical reports") {
  const auto& d = workspace();
  const auto a = d / "cv-a", b = d / "cv-b";
  REQUIRE(run(d, "cv " + data_flags() + " --k 10 --seed 7 --out '" + a.string() + "'") == 0);
  REQUIRE(run(d, "cv " + data_flags() + " --k 10 --seed 7 --threads 3 --out '" + b.string() + "'") == 0);
  for (const char* f : {"report.txt", "report.csv", "run.json"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto report = evaluation::parse_report(slurp(a / "report.csv"));
  CHECK(report.confusion.total() == 50);
  CHECK(report.seed == 7);
  const auto run_json = json::parse(slurp(a / "run.json"));
  CHECK(run_json["k"] == 10);
}

TEST_CASE("ablate writes a 7x4 grid") {
  const auto& d = workspace();
  const auto out = d / "ablate";
  REQUIRE(run(d, "ablate " + data_flags() + " --seed 7 --no-audit --out '" + out.string() + "'") == 0);
  const auto grid = evaluation::parse_grid(slurp(out / "grid.csv"));
  REQUIRE(grid.cells.size() == 7);
  for (const auto& row : grid.cells) CHECK(row.size() == 4);
  CHECK(slurp(out / "grid.txt").find("50% Split") != std::string::npos);
}

TEST_CASE("extract writes one row per document") {
  const auto& d = workspace();
  REQUIRE(run(d, "extract " + data_flags() + " --features SE --out '" + (d / "features.csv").string() + "'") == 0);
  std::istringstream in(slurp(d / "features.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "id,cosine_reference,spell_errors,oov_count");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 50);
}

TEST_CASE("exit codes") {
  const auto& d = workspace();
  CHECK(run(d, "train --model svm --out x.json") == 2);  // missing --corpus
  CHECK(run(d, "train --corpus '" + (d / "absent.jsonl").string() + "' --out x.json") == 2);
  CHECK(slurp(d / "stderr.txt").find("corpus") != std::string::npos);
  CHECK(run(d, "cv " + data_flags() + " --model nonsense") == 2);
  CHECK(run(d, "cv " + data_flags() + " --features T+QQ") == 2);
  CHECK(run(d, "train " + data_flags() + " --resources '" + (d / "no-such-dir").string() + "' --out x.json") == 2);
  CHECK(run(d, "no-such-command") == 2);

  // pipeline errors exit 1 with a module-attributed message
  CHECK(run(d, "cv " + data_flags() + " --k 40") == 1);
  CHECK(slurp(d / "stderr.txt").find("corpus:") != std::string::npos);
  std::ofstream(d / "blank.txt") << "?!";
  REQUIRE(run(d, "train " + data_flags() + " --features SE --model lr --out '" + (d / "m.json").string() + "'") == 0);
  CHECK(run(d, "predict --model '" + (d / "m.json").string() + "' --essay '" + (d / "blank.txt").string() +
                   "' --embeddings '" + (d / "embeddings.txt").string() + "'") == 1);
  CHECK(slurp(d / "stderr.txt").find("empty document") != std::string::npos);
}

TEST_CASE("serve answers health and evaluate with env configuration") {
  const auto& d = workspace();
  const auto model = d / "serve.json";
  REQUIRE(run(d, "train " + data_flags() + " --model lr --out '" + model.string() + "'") == 0);

  // pick a free port, then hand it to the service through PORT
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  const auto pid_file = d / "serve.pid";
  const std::string cmd = "PORT=" + std::to_string(port) + " MODEL_PATH='" + model.string() +
                          "' SOPEVAL_EMBEDDINGS='" + (d / "embeddings.txt").string() + "' sh -c 'echo $$ > \"" +
                          pid_file.string() + "\"; exec \"" SOPEVAL_CLI "\" serve --host 127.0.0.1' > /dev/null 2>&1 &";
  REQUIRE(std::system(cmd.c_str()) == 0);

  httplib::Client client("127.0.0.1", port);
  std::string status;
  for (int i = 0; i < 200 && status != "ok"; ++i) {
    if (auto r = client.Get("/v1/health")) status = json::parse(r->body)["status"];
    if (status != "ok") std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  CHECK(status == "ok");
  auto r = client.Post("/v1/evaluate", json{{"text", "I love research in science."}}.dump(), "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body)["model_id"] == load_model(model).model_id);

  std::ifstream pid_in(pid_file);
  int pid = 0;
  pid_in >> pid;
  if (pid > 0) ::kill(pid, SIGTERM);
}
