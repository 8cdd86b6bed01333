#include "satf/dimacs.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "satf/error.hpp"

namespace satf {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorCode::parse_error, "dimacs line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
std::optional<T> to_number(std::string_view token) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

}  // namespace

KSatInstance read_dimacs(std::string_view text) {
  std::optional<std::uint32_t> n;
  std::optional<std::size_t> declared_m;
  std::optional<std::uint32_t> k_hint;
  std::optional<std::uint64_t> seed;
  std::vector<Clause> clauses;
  Clause current;
  std::vector<std::size_t> seen_at;  // variable -> clause stamp
  std::size_t current_stamp = 1;
  std::size_t line_no = 0;
  std::size_t pos = 0;

  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "c") {
      if (tokens.size() == 4 && tokens[1] == "satf") {
        if (tokens[2] == "k") k_hint = to_number<std::uint32_t>(tokens[3]);
        if (tokens[2] == "seed") seed = to_number<std::uint64_t>(tokens[3]);
      }
      continue;
    }
    if (tokens[0][0] == 'c') continue;
    if (tokens[0] == "%") break;  // SATLIB trailer
    if (tokens[0] == "p") {
      if (n) parse_fail(line_no, "duplicate header");
      if (tokens.size() != 4 || tokens[1] != "cnf") parse_fail(line_no, "expected 'p cnf <n> <m>'");
      n = to_number<std::uint32_t>(tokens[2]);
      declared_m = to_number<std::size_t>(tokens[3]);
      if (!n || !declared_m) parse_fail(line_no, "malformed header counts");
      seen_at.assign(*n, 0);
      continue;
    }
    if (!n) parse_fail(line_no, "clause before 'p cnf' header");
    for (std::string_view tok : tokens) {
      auto value = to_number<std::int64_t>(tok);
      if (!value) parse_fail(line_no, "invalid literal '" + std::string(tok) + "'");
      if (*value == 0) {
        if (current.empty()) parse_fail(line_no, "empty clause");
        clauses.push_back(std::move(current));
        current.clear();
        ++current_stamp;
        continue;
      }
      const std::int64_t magnitude = *value < 0 ? -*value : *value;
      if (magnitude > static_cast<std::int64_t>(*n))
        parse_fail(line_no, "literal " + std::string(tok) + " exceeds declared n=" + std::to_string(*n));
      const auto var = static_cast<std::uint32_t>(magnitude - 1);
      if (seen_at[var] == current_stamp) {
        bool complementary = false;
        for (const Literal& lit : current)
          if (lit.variable == var && lit.negated != (*value < 0)) complementary = true;
        parse_fail(line_no, complementary ? "complementary literals on variable " + std::to_string(magnitude)
                                          : "repeated literal on variable " + std::to_string(magnitude));
      }
      seen_at[var] = current_stamp;
      current.push_back(Literal{var, *value < 0});
    }
  }
  if (!n) fail(ErrorCode::parse_error, "dimacs: missing 'p cnf' header");
  if (!current.empty()) parse_fail(line_no, "last clause is not terminated by 0");
  if (clauses.size() != *declared_m)
    fail(ErrorCode::parse_error, "dimacs: header declares " + std::to_string(*declared_m) + " clauses, found " +
                                     std::to_string(clauses.size()));

  std::uint32_t k = 0;
  bool uniform = true;
  for (const Clause& c : clauses) {
    if (k == 0) k = static_cast<std::uint32_t>(c.size());
    if (c.size() != k) uniform = false;
  }
  if (k_hint) {
    if (uniform && !clauses.empty() && *k_hint != k) uniform = false;
    k = *k_hint;
  } else if (!uniform) {
    for (const Clause& c : clauses) k = std::max<std::uint32_t>(k, static_cast<std::uint32_t>(c.size()));
  }
  return KSatInstance(*n, k, clauses, seed, !uniform);
}

std::string write_dimacs(const KSatInstance& instance) {
  std::ostringstream out;
  out << "c satf k " << instance.k() << '\n';
  if (auto seed = instance.source_seed()) out << "c satf seed " << *seed << '\n';
  out << "p cnf " << instance.n() << ' ' << instance.m() << '\n';
  for (std::size_t i = 0; i < instance.m(); ++i) {
    for (const Literal& lit : instance.clause(i))
      out << (lit.negated ? "-" : "") << (lit.variable + 1) << ' ';
    out << "0\n";
  }
  return out.str();
}

KSatInstance load_dimacs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return read_dimacs(buffer.str());
}

void save_dimacs(const KSatInstance& instance, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path.string());
  out << write_dimacs(instance);
  if (!out) fail(ErrorCode::io_error, "write failed for " + path.string());
}

}  // namespace satf
