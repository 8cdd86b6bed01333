#include <satf.h>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(SATF_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t got; (got = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("satf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
           std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string at(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("bogus").code, 2);
  EXPECT_EQ(run("gen --k 6 --n 5 --m 3 --out " + at("g")).code, 2);
  EXPECT_EQ(run("gen --k 3 --n 5 --m 3 --alpha 2 --out " + at("g")).code, 2);
  EXPECT_EQ(run("gen --k 3 --n 5 --out " + at("g")).code, 2);
  EXPECT_EQ(run("solve --solver xx --schedule a --in b").code, 2);
  EXPECT_EQ(run("--version").code, 0);
}

TEST_F(Cli, GenSizesFromEfficiencyAndIsDeterministic) {
  const auto r = run("gen --n 50 --k 4 --efficiency 0.75 --out " + at("g"));
  ASSERT_EQ(r.code, 0);
  int cnf = 0;
  for (const auto& e : fs::directory_iterator(dir / "g")) cnf += e.path().extension() == ".cnf";
  EXPECT_EQ(cnf, 20);
  EXPECT_NE(slurp(dir / "g" / "inst_000.cnf").find("p cnf 50 403"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "g" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "g" / "inst_019.json"));

  ASSERT_EQ(run("gen --n 20 --k 3 --alpha 4 --count 1 --seed 7 --out " + at("a")).code, 0);
  ASSERT_EQ(run("gen --n 20 --k 3 --alpha 4 --count 1 --seed 7 --out " + at("b")).code, 0);
  EXPECT_EQ(slurp(dir / "a" / "inst_000.cnf"), slurp(dir / "b" / "inst_000.cnf"));
  // Run directories are not overwritten.
  EXPECT_EQ(run("gen --n 20 --k 3 --alpha 4 --count 1 --seed 7 --out " + at("a")).code, 1);
}

TEST_F(Cli, SolveContract) {
  spit(dir / "easy.cnf", "p cnf 10 1\n1 2 3 0\n");
  spit(dir / "sa.json", R"({"solver":"sa","beta_0":0.1,"beta_1":5,"mcs":50})");
  spit(dir / "m1.json", R"({"solver":"sqa","gamma_0":1,"gamma_1":0,"beta":4,"slices":1,"mcs":50})");
  auto r = run("solve --solver sa --schedule " + at("sa.json") + " --runs 0 --in " + at("easy.cnf"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "");
  r = run("solve --solver sa --schedule " + at("sa.json") + " --runs 5 --in " + at("easy.cnf"));
  ASSERT_EQ(r.code, 0);
  const auto records = lines(r.out);
  ASSERT_EQ(records.size(), 5u);
  for (const auto& rec : records) EXPECT_NE(rec.find("\"energy\":0"), std::string::npos) << rec;

  EXPECT_EQ(run("solve --solver sqa --schedule " + at("m1.json") + " --in " + at("easy.cnf")).code, 1);
  EXPECT_EQ(run("solve --solver sqa --schedule " + at("sa.json") + " --in " + at("easy.cnf")).code, 1);
  EXPECT_EQ(run("solve --solver sa --schedule " + at("sa.json") + " --in " + at("missing.cnf")).code, 1);

  // --out appends.
  ASSERT_EQ(run("solve --solver sa --schedule " + at("sa.json") + " --runs 2 --in " + at("easy.cnf") + " --out " +
                at("c.jsonl"))
                .code,
            0);
  ASSERT_EQ(run("solve --solver sa --schedule " + at("sa.json") + " --runs 3 --in " + at("easy.cnf") + " --out " +
                at("c.jsonl"))
                .code,
            0);
  EXPECT_EQ(lines(slurp(dir / "c.jsonl")).size(), 5u);
}

TEST_F(Cli, FilterBuildAndQuery) {
  std::string elements;
  for (int i = 0; i < 25; ++i) elements += "user" + std::to_string(i) + "\n";
  spit(dir / "set.txt", elements);
  spit(dir / "ws.json", R"({"solver":"ws","noise":0.5})");
  const auto built = run("filter-build --elements " + at("set.txt") + " --n 12 --k 3 --solutions 2 --schedule " +
                         at("ws.json") + " --out " + at("f.bin"));
  ASSERT_EQ(built.code, 0);
  EXPECT_NE(built.out.find("\"fpr\""), std::string::npos);
  const auto q = run("filter-query --filter " + at("f.bin") + " user3");
  EXPECT_EQ(q.code, 0);
  EXPECT_EQ(q.out, "maybe\n");
  const auto many = run("filter-query --filter " + at("f.bin") + " user0 user24");
  EXPECT_EQ(lines(many.out).size(), 2u);
  EXPECT_EQ(run("filter-query --filter " + at("nope.bin") + " x").code, 1);
}

TEST_F(Cli, AnalyzeMatchesLibraryAndIndependentBaseline) {
  // Nearly unconstrained instances: uniformly sampled solutions are independent.
  constexpr int kInstances = 12;
  constexpr int kSolutions = 40;
  fs::create_directories(dir / "inst");
  std::mt19937_64 rng(5);
  std::string jsonl;
  std::vector<satf_instance*> handles;
  for (int i = 0; i < kInstances; ++i) {
    satf_instance* inst = nullptr;
    ASSERT_EQ(satf_instance_generate(12, 3, 2, 100 + i, &inst), SATF_OK);
    char name[32];
    std::snprintf(name, sizeof name, "inst_%03d.cnf", i);
    ASSERT_EQ(satf_instance_save(inst, (dir / "inst" / name).c_str()), SATF_OK);
    char* all = nullptr;
    uint64_t count = 0;
    ASSERT_EQ(satf_instance_enumerate(inst, &all, &count), SATF_OK);
    auto pool = lines(all);
    satf_string_free(all);
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int r = 0; r < kSolutions; ++r)
      jsonl += "{\"instance\":" + std::to_string(i) + ",\"solver\":\"sa\",\"run\":" + std::to_string(r) +
               ",\"seed\":0,\"n\":12,\"assignment\":\"" + pool[r] + "\",\"energy\":0}\n";
    handles.push_back(inst);
  }
  spit(dir / "census.jsonl", jsonl);

  const auto r = run("analyze fpr-curve --census " + at("census.jsonl") + " --instances " + at("inst") +
                     " --s-max 10 --resamples 10");
  ASSERT_EQ(r.code, 0);

  satf_census* census = nullptr;
  ASSERT_EQ(satf_census_parse(jsonl.c_str(), kInstances, &census), SATF_OK);
  char* csv = nullptr;
  ASSERT_EQ(satf_analyze(census, handles.data(), handles.size(), "fpr-curve", R"({"s_max":10,"resamples":10})", &csv),
            SATF_OK);
  EXPECT_EQ(r.out, std::string(csv));
  satf_string_free(csv);
  satf_census_free(census);
  for (auto* h : handles) satf_instance_free(h);

  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 12u);
  for (std::size_t s = 1; s <= 10; ++s) {
    std::istringstream row(rows[s + 1]);
    std::string x, mean, se;
    std::getline(row, x, ',');
    std::getline(row, mean, ',');
    std::getline(row, se, ',');
    ASSERT_EQ(std::stoul(x), s);
    const double expected = satf_fpr_independent(3, s);
    EXPECT_NEAR(std::stod(mean), expected, 4 * std::stod(se) + 0.01) << "s=" << s;
  }

  EXPECT_EQ(run("analyze hamming --census " + at("census.jsonl")).code, 0);
  EXPECT_EQ(run("analyze fpr-curve --census " + at("census.jsonl")).code, 1);
  EXPECT_EQ(run("analyze nonsense --census " + at("census.jsonl")).code, 2);
}

TEST_F(Cli, SweepAndScaling) {
  spit(dir / "spec.json", R"({"k":3,"n":[10],"alpha":3.0,"instance_count":2,"runs_per_instance":6,
    "pilot_runs":3,"scaling_runs":4,"mcs":30,"solvers":["sa","ws"],
    "sa_grid":{"beta_0":[0.1],"beta_1":[2.0,4.0]},"curves":{"s_max":4,"resamples":2,"seed":0}})");
  ASSERT_EQ(run("sweep --workers 2 --spec " + at("spec.json") + " --out " + at("run")).code, 0);
  EXPECT_TRUE(fs::exists(dir / "run" / "manifest.json"));
  EXPECT_EQ(lines(slurp(dir / "run" / "census.jsonl")).size(), 2u * 2u * 6u);
  EXPECT_EQ(run("sweep --spec " + at("spec.json") + " --out " + at("run")).code, 1);

  const auto one = run("scaling --workers 1 --spec " + at("spec.json") + " --n 10");
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(lines(one.out).size(), 2u);
  const auto two = run("scaling --spec " + at("spec.json") + " --n 8 --n 10 --out " + at("sc"));
  ASSERT_EQ(two.code, 0);
  EXPECT_EQ(lines(two.out).size(), 3u);
  EXPECT_TRUE(fs::exists(dir / "sc" / "effort.csv"));
}
