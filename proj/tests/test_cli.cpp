#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "ccqed_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(CCQED_CLI_PATH) + " " + args + " > " + (kScratch / "stdout.txt").string() +
                          " 2> " + (kScratch / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Scratch {
  Scratch() { fs::create_directories(kScratch); }
  ~Scratch() { fs::remove_all(kScratch); }
};

}  // namespace

TEST_CASE("preset runs are byte-identical") {
  Scratch s;
  const fs::path a = kScratch / "a.csv", b = kScratch / "b.csv";
  CHECK(run("preset fig1a --output " + a.string()) == 0);
  CHECK(run("preset fig1a --workers 2 --output " + b.string()) == 0);
  const std::string text = slurp(a);
  CHECK(text == slurp(b));
  CHECK(std::count(text.begin(), text.end(), '\n') == 402);
}

TEST_CASE("flags override the config file") {
  Scratch s;
  const fs::path cfg = kScratch / "run.cfg", out = kScratch / "out.jsonl";
  std::ofstream(cfg) << "start = -10\nstop = 10\ncount = 3\nformat = jsonl\nsolvers = linear\n";
  CHECK(run("sweep -c " + cfg.string() + " --count 4 --output " + out.string()) == 0);
  const std::string text = slurp(out);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.rfind("{\"delta_c\":-10", 0) == 0);
  CHECK(text.find("linear_mean_excitation") != std::string::npos);
}

TEST_CASE("stdout is the default sink") {
  Scratch s;
  CHECK(run("sweep --start 0 --stop 1 --count 2") == 0);
  CHECK(slurp(kScratch / "stdout.txt").rfind("delta_c,n_delta_c,", 0) == 0);
}

TEST_CASE("exit code 2 for usage and config errors") {
  Scratch s;
  CHECK(run("preset fig9") == 2);
  CHECK(run("sweep --count 1") == 2);
  CHECK(run("sweep --kappa -1") == 2);
  CHECK(run("sweep --variable time") == 2);
  CHECK(run("nonsense") == 2);
  CHECK(run("") == 2);
  const fs::path cfg = kScratch / "bad.cfg";
  std::ofstream(cfg) << "kappa = 5\n  bogus = 1\n";
  CHECK(run("sweep -c " + cfg.string()) == 2);
  CHECK(slurp(kScratch / "stderr.txt").find("bad.cfg:2:3") != std::string::npos);
  CHECK(run("sweep -c " + (kScratch / "missing.cfg").string()) == 2);
}

TEST_CASE("exit code 1 when every point fails") {
  Scratch s;
  CHECK(run("sweep --variable eta --start 0.2 --stop 0.3 --count 3") == 1);
  CHECK(slurp(kScratch / "stderr.txt").find("exceeds 1/sqrt(N)") != std::string::npos);
  CHECK(run("sweep --variable eta --start 0 --stop 0.3 --count 4") == 0);
}

TEST_CASE("exit code 3 for an unwritable output") {
  Scratch s;
  CHECK(run("preset fig2 --output /nonexistent-dir/out.csv") == 3);
}

TEST_CASE("rates prints the effective model") {
  Scratch s;
  CHECK(run("rates --delta-c 0 --eta-sqrtn 1") == 0);
  const std::string out = slurp(kScratch / "stdout.txt");
  CHECK(out.find("n_delta_c              7.88816898124") != std::string::npos);
  CHECK(out.find("branch                 MainSeries") != std::string::npos);
}

TEST_CASE("rates can dump the steady state") {
  Scratch s;
  const fs::path dump = kScratch / "rho.txt";
  CHECK(run("rates --delta-c -50 --epsilon 3000 --eta-sqrtn 1 --dump-rho " + dump.string()) == 0);
  const std::string text = slurp(dump);
  const auto lines = std::count(text.begin(), text.end(), '\n');
  CHECK((lines == 32 || lines == 64));
  CHECK(text.find(',') != std::string::npos);
}
