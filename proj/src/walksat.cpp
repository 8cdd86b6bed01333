#include <sys/wait.h>
#include <unistd.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "clause_tracker.hpp"
#include "satf/dimacs.hpp"
#include "satf/error.hpp"
#include "satf/solvers.hpp"

namespace satf {

std::uint64_t default_max_flips(const KSatInstance& instance) {
  return std::max<std::uint64_t>(1, 100 * static_cast<std::uint64_t>(instance.m()));
}

SolverRunResult run_walksat(const KSatInstance& instance, const WalksatConfig& config,
                            const WalkObserver& observer, const std::optional<Assignment>& initial) {
  config.validate();
  const std::uint64_t max_flips = config.max_flips == 0 ? default_max_flips(instance) : config.max_flips;
  Rng init(derive_seed({config.seed, static_cast<std::uint64_t>(Stream::init)}));
  Rng walk(derive_seed({config.seed, static_cast<std::uint64_t>(Stream::walk)}));

  Assignment start = initial ? *initial : Assignment::random(instance.n(), init);
  if (start.size() != instance.n()) fail(ErrorCode::dimension_mismatch, "initial assignment has the wrong length");

  const detail::Occurrences occ(instance);
  detail::ClauseTracker state(instance, occ, detail::unpack(start), true);

  std::vector<std::uint32_t> candidates;
  std::uint64_t flips = 0;
  while (state.energy() > 0 && flips < max_flips) {
    const auto& unsat = state.unsat_clauses();
    const std::uint32_t clause = unsat[walk.below(unsat.size())];
    candidates.clear();
    for (const Literal& lit : instance.clause(clause)) candidates.push_back(lit.variable);
    walk.shuffle(std::span<std::uint32_t>(candidates));

    std::uint32_t chosen = candidates.front();
    int best_break = std::numeric_limits<int>::max();
    for (std::uint32_t v : candidates) {
      const int b = state.break_count(v);
      if (b < best_break) {
        best_break = b;
        chosen = v;
      }
    }
    WalkMove move = WalkMove::freebie;
    if (best_break > 0) {
      if (walk.uniform() < config.noise) {
        chosen = candidates[walk.below(candidates.size())];
        move = WalkMove::random_walk;
      } else {
        move = WalkMove::greedy;
      }
    }
    state.flip(chosen);
    ++flips;
    if (observer) observer(WalkStep{flips, chosen, move, state.energy()});
  }

  SolverRunResult result;
  result.final_assignment = detail::pack(state.values());
  result.final_energy = state.energy();
  result.satisfied = result.final_energy == 0;
  result.mcs_used = flips;
  result.seed = config.seed;
  result.solver_id = SolverId::WS;
  return result;
}

Assignment parse_walksat_solution(std::string_view text, std::uint32_t n) {
  Assignment a(n);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tok;
    bool first = true;
    while (tokens >> tok) {
      if (first && (tok == "c" || tok == "s" || tok[0] == 'c' || tok[0] == 's')) break;
      first = false;
      if (tok == "v") continue;
      std::int64_t lit = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), lit);
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        fail(ErrorCode::parse_error, "walksat solution line " + std::to_string(line_no) + ": bad token '" + tok + "'");
      if (lit == 0) continue;
      const std::int64_t var = lit < 0 ? -lit : lit;
      if (var > static_cast<std::int64_t>(n))
        fail(ErrorCode::parse_error, "walksat solution names variable " + std::to_string(var) + " > n");
      a.set(static_cast<std::size_t>(var - 1), lit > 0);
    }
  }
  return a;
}

SolverRunResult external_walksat_adapter(const std::filesystem::path& instance_path,
                                         const std::filesystem::path& binary_path, std::uint64_t seed) {
  const KSatInstance instance = load_dimacs(instance_path);
  if (!std::filesystem::exists(binary_path))
    fail(ErrorCode::process_failure, "walksat binary not found: " + binary_path.string());

  const auto out_path = std::filesystem::temp_directory_path() /
                        ("satf_walksat_" + std::to_string(::getpid()) + "_" + std::to_string(seed) + ".sol");
  std::filesystem::remove(out_path);

  const pid_t pid = ::fork();
  if (pid < 0) fail(ErrorCode::process_failure, "fork failed");
  if (pid == 0) {
    const std::string seed_flag = std::to_string(seed);
    const std::string out_flag = out_path.string();
    if (!std::freopen(instance_path.c_str(), "r", stdin)) ::_exit(127);
    if (!std::freopen("/dev/null", "w", stdout)) ::_exit(127);
    ::execl(binary_path.c_str(), binary_path.c_str(), "-printonlysol=TRUE", "-out", out_flag.c_str(), "-seed",
            seed_flag.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  int status = 0;
  if (::waitpid(pid, &status, 0) < 0) fail(ErrorCode::process_failure, "waitpid failed");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    std::filesystem::remove(out_path);
    fail(ErrorCode::process_failure, "walksat exited abnormally (status " + std::to_string(status) + ")");
  }

  std::ifstream in(out_path);
  if (!in) fail(ErrorCode::process_failure, "walksat produced no solution file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  in.close();
  std::filesystem::remove(out_path);

  Assignment a = parse_walksat_solution(buffer.str(), instance.n());
  if (!is_satisfying(instance, a))
    fail(ErrorCode::validation_failure, "walksat solution does not satisfy " + instance_path.string());

  SolverRunResult result;
  result.final_assignment = std::move(a);
  result.final_energy = 0;
  result.satisfied = true;
  result.seed = seed;
  result.solver_id = SolverId::WS;
  return result;
}

}  // namespace satf
