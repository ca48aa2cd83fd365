// End-to-end checks of the installed command surface; spawns the real
// binary (path injected by CMake).

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string out_path =
      (fs::temp_directory_path() / ("fnd_cli_out_" + std::to_string(counter++)))
          .string();
  std::string cmd = std::string(FND_CLI_PATH) + " " + args + " > " + out_path +
                    " 2> " + out_path + ".err";
  int rc = std::system(cmd.c_str());
  std::ifstream in(out_path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::remove(out_path.c_str());
  std::remove((out_path + ".err").c_str());
  int exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return {exit_code, buf.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fnd_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("cli end-to-end: gen, train, eval, explain, compare") {
  TempDir dir;
  std::string corpus = dir.file("c.jsonl");

  // gen writes the requested number of lines with the requested balance
  auto gen = run_cli("--seed 1 gen --n 100 --fake-fraction 0.5 --out " + corpus);
  REQUIRE(gen.exit_code == 0);
  CHECK(gen.stdout_text.find("\"fake\": 50") != std::string::npos);
  {
    std::ifstream in(corpus);
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 100);
  }

  // deterministic regeneration
  std::string corpus2 = dir.file("c2.jsonl");
  run_cli("--seed 1 gen --n 100 --fake-fraction 0.5 --out " + corpus2);
  CHECK(slurp(corpus) == slurp(corpus2));

  // train a fast model kind and evaluate it
  std::string model = dir.file("m.json");
  auto train = run_cli("--seed 2 train --corpus " + corpus +
                       " --model nb --features hybrid --out " + model);
  REQUIRE(train.exit_code == 0);
  REQUIRE(fs::exists(model));

  // retraining with identical flags gives a byte-identical model file
  std::string model_b = dir.file("mb.json");
  run_cli("--seed 2 train --corpus " + corpus +
          " --model nb --features hybrid --out " + model_b);
  CHECK(slurp(model) == slurp(model_b));

  auto eval = run_cli("--seed 2 eval --model " + model + " --corpus " + corpus);
  REQUIRE(eval.exit_code == 0);
  CHECK(eval.stdout_text.find("\"macro\"") != std::string::npos);

  // explain one article in all three formats
  std::string html = dir.file("e.html");
  auto explain = run_cli("--seed 3 explain --model " + model + " --corpus " +
                         corpus + " --article-id a00000 --samples 60 "
                         "--format html --out " + html);
  REQUIRE(explain.exit_code == 0);
  CHECK(slurp(html).find("<!DOCTYPE html>") != std::string::npos);
  CHECK(explain.stdout_text.find("\"tokens\"") != std::string::npos);

  // unknown article id is a validation error
  auto missing = run_cli("explain --model " + model + " --corpus " + corpus +
                         " --article-id missing");
  CHECK(missing.exit_code == 1);

  // compare two fast kinds; repeated run is byte-identical
  std::string rep1 = dir.file("r1.json"), rep2 = dir.file("r2.json");
  auto cmp1 = run_cli("--seed 4 compare --corpus " + corpus +
                      " --models nb,dtree --out " + rep1);
  REQUIRE(cmp1.exit_code == 0);
  auto cmp2 = run_cli("--seed 4 compare --corpus " + corpus +
                      " --models nb,dtree --out " + rep2);
  REQUIRE(cmp2.exit_code == 0);
  CHECK(slurp(rep1) == slurp(rep2));
  CHECK(slurp(rep1).find("split_fingerprint") != std::string::npos);
}

TEST_CASE("cli train then eval: svm on a full-signal corpus clears 0.95") {
  TempDir dir;
  std::string corpus = dir.file("s1.jsonl");
  auto gen = run_cli("--seed 7 gen --n 600 --signal 1.0 --out " + corpus);
  REQUIRE(gen.exit_code == 0);
  std::string before = slurp(corpus);

  std::string model = dir.file("svm.json");
  auto train = run_cli("--seed 7 train --corpus " + corpus +
                       " --model svm --features hybrid --out " + model);
  REQUIRE(train.exit_code == 0);
  auto eval = run_cli("eval --model " + model + " --corpus " + corpus);
  REQUIRE(eval.exit_code == 0);
  auto f1_pos = eval.stdout_text.find("\"macro\"");
  REQUIRE(f1_pos != std::string::npos);
  auto f1_key = eval.stdout_text.find("\"f1\": ", f1_pos);
  double f1 = std::stod(eval.stdout_text.substr(f1_key + 6));
  CHECK(f1 >= 0.95);

  // Commands must not mutate their inputs.
  CHECK(slurp(corpus) == before);
}

TEST_CASE("cli validation failures exit with code 1") {
  TempDir dir;
  auto bad_sub = run_cli("frobnicate");
  CHECK(bad_sub.exit_code == 1);

  auto bad_flag = run_cli("gen --does-not-exist 1");
  CHECK(bad_flag.exit_code == 1);

  auto missing_corpus = run_cli("train --corpus " + dir.file("nope.jsonl") +
                                " --model nb --out " + dir.file("m.json"));
  CHECK(missing_corpus.exit_code == 1);

  auto bad_gen = run_cli("gen --n 4 --fake-fraction 0.1 --out " +
                         dir.file("x.jsonl"));
  CHECK(bad_gen.exit_code == 1);
}

TEST_CASE("cli external scores path") {
  TempDir dir;
  std::string corpus = dir.file("c.jsonl");
  run_cli("--seed 9 gen --n 40 --out " + corpus);

  // Build a perfect score file from the corpus labels.
  std::string scores = dir.file("scores.jsonl");
  {
    std::ifstream in(corpus);
    std::ofstream out(scores);
    std::string line;
    while (std::getline(in, line)) {
      auto idp = line.find("\"id\":\"") + 6;
      std::string id = line.substr(idp, line.find('"', idp) - idp);
      bool fake = line.find("\"label\":1") != std::string::npos;
      out << "{\"article_id\":\"" << id << "\",\"p_fake\":" << (fake ? 1 : 0)
          << "}\n";
    }
  }
  auto eval = run_cli("eval --corpus " + corpus + " --external-scores " + scores);
  REQUIRE(eval.exit_code == 0);
  CHECK(eval.stdout_text.find("\"external\"") != std::string::npos);
  CHECK(eval.stdout_text.find("\"f1\": 1.0") != std::string::npos);
}

TEST_CASE("cli thread cap does not change results") {
  TempDir dir;
  std::string corpus = dir.file("t.jsonl");
  run_cli("--seed 6 gen --n 120 --signal 0.8 --out " + corpus);
  std::string r1 = dir.file("r1.json"), r2 = dir.file("r2.json");
  auto a = run_cli("--seed 6 --threads 1 compare --corpus " + corpus +
                   " --models nb,rforest --out " + r1);
  auto b = run_cli("--seed 6 --threads 4 compare --corpus " + corpus +
                   " --models nb,rforest --out " + r2);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(r1) == slurp(r2));
}

TEST_CASE("cli quiet mode suppresses stdout") {
  TempDir dir;
  auto gen = run_cli("--quiet --seed 1 gen --n 20 --out " + dir.file("q.jsonl"));
  CHECK(gen.exit_code == 0);
  CHECK(gen.stdout_text.empty());
}
