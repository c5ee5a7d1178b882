#include "bala/io.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "bala/error.hpp"

namespace bala {

using Json = nlohmann::ordered_json;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::io_failure, "write failed for " + path);
}

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorCode::schema_error, msg); }

void check_keys(const Json& j, const std::set<std::string>& allowed,
                const std::set<std::string>& required, const std::string& where) {
  if (!j.is_object()) schema(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) schema("unknown field '" + key + "' in " + where);
  }
  for (const auto& key : required) {
    if (!j.contains(key)) schema("missing field '" + key + "' in " + where);
  }
}

double get_number(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_number()) schema("field '" + key + "' must be a number");
  return v.get<double>();
}

std::size_t get_count(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    schema("field '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

Vec get_vector(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_array()) schema("field '" + key + "' must be an array");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) schema("field '" + key + "' must hold numbers");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

Json vector_json(const Vec& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) throw Error(ErrorCode::invalid_argument, "non-finite value");
    arr.push_back(v(i));
  }
  return arr;
}

Json finite(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::invalid_argument, "non-finite value");
  return Json(x);
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::malformed_file, std::string("malformed JSON: ") + e.what());
  }
}

void check_version(const Json& j) {
  if (!j.is_object()) schema("top level must be an object");
  if (!j.contains("format_version")) schema("missing field 'format_version'");
  if (!j.at("format_version").is_string()) schema("'format_version' must be a string");
  const auto version = j.at("format_version").get<std::string>();
  if (version != "1") {
    throw Error(ErrorCode::version_mismatch, "unsupported format_version '" + version + "'");
  }
}

Json cone_json(const ConeSpec& cone) {
  Json j;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, NonnegL1>) {
          j["type"] = "nonneg_l1";
          j["n"] = c.n;
          j["a"] = finite(c.a);
        } else if constexpr (std::is_same_v<T, SocBound>) {
          j["type"] = "soc_bound";
          j["n"] = c.n;
          j["a"] = finite(c.a);
        } else {
          j["type"] = "psd_trace";
          j["nbar"] = c.nbar;
          j["gamma"] = finite(c.gamma);
        }
      },
      cone);
  return j;
}

ConeSpec cone_from_json(const Json& j) {
  if (!j.is_object()) schema("'cone' must be an object");
  if (!j.contains("type")) schema("missing cone tag 'type'");
  if (!j.at("type").is_string()) schema("cone 'type' must be a string");
  const auto type = j.at("type").get<std::string>();
  if (type == "nonneg_l1" || type == "soc_bound") {
    check_keys(j, {"type", "n", "a"}, {"type", "n", "a"}, "cone");
    const std::size_t n = get_count(j, "n");
    const double a = get_number(j, "a");
    if (type == "nonneg_l1") return NonnegL1{n, a};
    return SocBound{n, a};
  }
  if (type == "psd_trace") {
    check_keys(j, {"type", "nbar", "gamma"}, {"type", "nbar", "gamma"}, "cone");
    return PsdTrace{get_count(j, "nbar"), get_number(j, "gamma")};
  }
  schema("unknown cone type '" + type + "'");
}

}  // namespace

std::string problem_to_json(const ConicProblem& prob) {
  prob.validate();
  Json j;
  j["format_version"] = "1";
  j["cone"] = cone_json(prob.cone);
  j["c"] = vector_json(prob.c);
  j["b"] = vector_json(prob.b);
  Json entries = Json::array();
  for (const auto& t : prob.a.entries()) {
    entries.push_back(Json::array({t.row + 1, t.col + 1, finite(t.value)}));
  }
  j["A"] = std::move(entries);
  if (prob.certificate) {
    const auto& cert = *prob.certificate;
    Json cj;
    cj["p_star"] = finite(cert.p_star);
    if (cert.x_star) cj["x_star"] = vector_json(*cert.x_star);
    if (cert.y_star) cj["y_star"] = vector_json(*cert.y_star);
    if (cert.g_star) cj["g_star"] = finite(*cert.g_star);
    if (cert.witness_only) cj["witness_only"] = true;
    j["certificate"] = std::move(cj);
  }
  if (!prob.metadata.empty()) {
    Json mj = Json::object();
    for (const auto& [key, value] : prob.metadata) mj[key] = finite(value);
    j["metadata"] = std::move(mj);
  }
  return j.dump(1) + "\n";
}

ConicProblem problem_from_json(const std::string& text) {
  const Json j = parse_json(text);
  check_version(j);
  check_keys(j, {"format_version", "cone", "c", "b", "A", "certificate", "metadata"},
             {"cone", "c", "b", "A"}, "problem");
  ConicProblem prob;
  prob.cone = cone_from_json(j.at("cone"));
  prob.c = get_vector(j, "c");
  prob.b = get_vector(j, "b");
  const auto n = static_cast<std::size_t>(prob.c.size());
  const auto m = static_cast<std::size_t>(prob.b.size());
  const Json& aj = j.at("A");
  if (!aj.is_array()) schema("'A' must be an array of [row, col, value] triplets");
  std::vector<Triplet> triplets;
  triplets.reserve(aj.size());
  for (const auto& t : aj) {
    if (!t.is_array() || t.size() != 3) schema("'A' entries must be [row, col, value]");
    if (!t[0].is_number_integer() || !t[1].is_number_integer() || !t[2].is_number()) {
      schema("'A' entries must be [integer, integer, number]");
    }
    const long long row = t[0].get<long long>();
    const long long col = t[1].get<long long>();
    if (row < 1 || col < 1 || static_cast<std::size_t>(row) > m ||
        static_cast<std::size_t>(col) > n) {
      throw Error(ErrorCode::dimension_inconsistent,
                  "triplet (" + std::to_string(row) + ", " + std::to_string(col) +
                      ") outside a " + std::to_string(m) + " x " + std::to_string(n) + " map");
    }
    triplets.push_back({static_cast<std::size_t>(row - 1), static_cast<std::size_t>(col - 1),
                        t[2].get<double>()});
  }
  prob.a = LinearMap(m, n, std::move(triplets));
  if (j.contains("certificate")) {
    const Json& cj = j.at("certificate");
    check_keys(cj, {"p_star", "x_star", "y_star", "g_star", "witness_only"}, {"p_star"},
               "certificate");
    Certificate cert;
    cert.p_star = get_number(cj, "p_star");
    if (cj.contains("x_star")) cert.x_star = get_vector(cj, "x_star");
    if (cj.contains("y_star")) cert.y_star = get_vector(cj, "y_star");
    if (cj.contains("g_star")) cert.g_star = get_number(cj, "g_star");
    if (cj.contains("witness_only")) {
      if (!cj.at("witness_only").is_boolean()) schema("'witness_only' must be a boolean");
      cert.witness_only = cj.at("witness_only").get<bool>();
    }
    prob.certificate = cert;
  }
  if (j.contains("metadata")) {
    const Json& mj = j.at("metadata");
    if (!mj.is_object()) schema("'metadata' must be an object");
    for (const auto& [key, value] : mj.items()) {
      if (!value.is_number()) schema("metadata values must be numbers");
      prob.metadata[key] = value.get<double>();
    }
  }
  prob.validate();
  return prob;
}

void write_problem(const ConicProblem& prob, const std::string& path) {
  write_text_file(path, problem_to_json(prob));
}

ConicProblem read_problem(const std::string& path) {
  return problem_from_json(read_text_file(path));
}

// ---------------------------------------------------------------------------
// SDPA

ConicProblem sdpa_from_string(const std::string& text, double trace_bound) {
  if (!(trace_bound > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "SDPA input needs a positive trace bound");
  }
  // Strip comments, then treat the usual punctuation as whitespace.
  std::istringstream lines(text);
  std::string line;
  std::vector<std::string> data_lines;
  while (std::getline(lines, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '"' || line[first] == '*') continue;
    for (char& ch : line) {
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == '=') ch = ' ';
    }
    data_lines.push_back(line);
  }
  std::size_t cursor = 0;
  auto next_line = [&](const char* what) -> std::istringstream {
    if (cursor >= data_lines.size()) {
      throw Error(ErrorCode::malformed_file, std::string("SDPA: missing ") + what);
    }
    return std::istringstream(data_lines[cursor++]);
  };
  long long m = 0, nblocks = 0;
  if (!(next_line("constraint count") >> m) || m < 1) {
    throw Error(ErrorCode::malformed_file, "SDPA: bad constraint count");
  }
  if (!(next_line("block count") >> nblocks) || nblocks < 1) {
    throw Error(ErrorCode::malformed_file, "SDPA: bad block count");
  }
  if (nblocks != 1) {
    throw Error(ErrorCode::unsupported_format,
                "SDPA: only single-block problems are supported, file has " +
                    std::to_string(nblocks) + " blocks");
  }
  long long block = 0;
  if (!(next_line("block structure") >> block) || block == 0) {
    throw Error(ErrorCode::malformed_file, "SDPA: bad block structure");
  }
  if (block < 0) {
    throw Error(ErrorCode::unsupported_format, "SDPA: diagonal (LP) blocks are not supported");
  }
  const auto nbar = static_cast<std::size_t>(block);
  Vec rhs(m);
  {
    // the objective vector may span several lines
    Eigen::Index filled = 0;
    while (filled < m) {
      auto ls = next_line("objective vector");
      double v = 0.0;
      while (filled < m && ls >> v) rhs(filled++) = v;
    }
  }
  const std::size_t len = svec_length(nbar);
  Vec c = Vec::Zero(static_cast<Eigen::Index>(len));
  std::vector<Triplet> triplets;
  while (cursor < data_lines.size()) {
    std::istringstream ls(data_lines[cursor++]);
    long long mat = 0, blk = 0, i = 0, j = 0;
    double v = 0.0;
    if (!(ls >> mat >> blk >> i >> j >> v)) {
      throw Error(ErrorCode::malformed_file, "SDPA: bad entry line '" + data_lines[cursor - 1] + "'");
    }
    if (mat < 0 || mat > m || blk != 1 || i < 1 || j < 1 || i > block || j > block) {
      throw Error(ErrorCode::dimension_inconsistent,
                  "SDPA: entry out of range '" + data_lines[cursor - 1] + "'");
    }
    const std::size_t idx = svec_index(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
    const double value = i == j ? v : std::numbers::sqrt2 * v;
    if (mat == 0) {
      c(static_cast<Eigen::Index>(idx)) -= value;
    } else {
      triplets.push_back({static_cast<std::size_t>(mat - 1), idx, value});
    }
  }
  ConicProblem prob;
  prob.c = c;
  prob.b = rhs;
  prob.a = LinearMap(static_cast<std::size_t>(m), len, std::move(triplets));
  prob.cone = PsdTrace{nbar, trace_bound};
  prob.validate();
  return prob;
}

ConicProblem read_sdpa(const std::string& path, double trace_bound) {
  return sdpa_from_string(read_text_file(path), trace_bound);
}

// ---------------------------------------------------------------------------
// Trace CSV

namespace {

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

double parse_double(const std::string& field) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw Error(ErrorCode::malformed_file, "bad number '" + field + "'");
  }
  return v;
}

}  // namespace

std::string format_trace_row(const IterationRecord& rec, bool with_time) {
  std::string row = std::to_string(rec.k);
  row += rec.step == StepType::descent ? ",D," : ",N,";
  row += format_double(rec.g_y) + "," + format_double(rec.g_z) + "," +
         format_double(rec.gk_z) + "," + format_double(rec.affine) + "," +
         opt_field(rec.cost_gap) + "," + opt_field(rec.dual_gap) + "," +
         (with_time ? format_double(rec.wall_ms) : std::string());
  return row;
}

IterationRecord parse_trace_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  if (fields.size() != 9) throw Error(ErrorCode::malformed_file, "trace row needs 9 fields");
  IterationRecord rec;
  rec.k = static_cast<std::size_t>(parse_double(fields[0]));
  if (fields[1] == "D") {
    rec.step = StepType::descent;
  } else if (fields[1] == "N") {
    rec.step = StepType::null;
  } else {
    throw Error(ErrorCode::malformed_file, "trace step must be D or N");
  }
  rec.g_y = parse_double(fields[2]);
  rec.g_z = parse_double(fields[3]);
  rec.gk_z = parse_double(fields[4]);
  rec.affine = parse_double(fields[5]);
  if (!fields[6].empty()) rec.cost_gap = parse_double(fields[6]);
  if (!fields[7].empty()) rec.dual_gap = parse_double(fields[7]);
  if (!fields[8].empty()) rec.wall_ms = parse_double(fields[8]);
  return rec;
}

TraceWriter::TraceWriter(const std::string& path, bool with_time)
    : out_(path), path_(path), with_time_(with_time) {
  if (!out_) throw Error(ErrorCode::io_failure, "cannot write " + path);
  out_ << kTraceHeader << '\n';
}

void TraceWriter::write(const IterationRecord& rec) {
  out_ << format_trace_row(rec, with_time_) << '\n';
  if (!out_) throw Error(ErrorCode::io_failure, "write failed for " + path_);
}

std::vector<IterationRecord> read_trace(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw Error(ErrorCode::malformed_file, "trace header mismatch in " + path);
  }
  std::vector<IterationRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_trace_row(line));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solution file

SolutionFile make_solution(const ConicProblem& prob, const SolveResult& result) {
  SolutionFile sol;
  sol.x = result.x_final;
  sol.y = result.y_final;
  sol.x_average = result.x_average;
  sol.iterations = result.state.k;
  sol.descent_steps = result.state.descent_indices.size();
  sol.null_steps = sol.iterations - sol.descent_steps;
  const PrimalResiduals res = primal_residuals(prob, sol.x);
  sol.affine = res.affine;
  sol.cost_gap = res.cost_gap;
  if (prob.certificate && (prob.certificate->g_star || !prob.certificate->witness_only)) {
    const double g_star = prob.certificate->g_star.value_or(-prob.certificate->p_star);
    sol.dual_gap = result.state.g_y - g_star;
  }
  sol.stop_reason = to_string(result.reason);
  return sol;
}

std::string solution_to_json(const SolutionFile& sol) {
  Json j;
  j["format_version"] = "1";
  j["x"] = vector_json(sol.x);
  j["y"] = vector_json(sol.y);
  j["x_average"] = vector_json(sol.x_average);
  j["iterations"] = sol.iterations;
  j["descent_steps"] = sol.descent_steps;
  j["null_steps"] = sol.null_steps;
  j["affine"] = finite(sol.affine);
  if (sol.cost_gap) j["cost_gap"] = finite(*sol.cost_gap);
  if (sol.dual_gap) j["dual_gap"] = finite(*sol.dual_gap);
  j["stop_reason"] = sol.stop_reason;
  return j.dump(1) + "\n";
}

SolutionFile solution_from_json(const std::string& text) {
  const Json j = parse_json(text);
  check_version(j);
  check_keys(j,
             {"format_version", "x", "y", "x_average", "iterations", "descent_steps",
              "null_steps", "affine", "cost_gap", "dual_gap", "stop_reason"},
             {"x", "y", "x_average", "iterations", "descent_steps", "null_steps", "affine",
              "stop_reason"},
             "solution");
  SolutionFile sol;
  sol.x = get_vector(j, "x");
  sol.y = get_vector(j, "y");
  sol.x_average = get_vector(j, "x_average");
  sol.iterations = get_count(j, "iterations");
  sol.descent_steps = get_count(j, "descent_steps");
  sol.null_steps = get_count(j, "null_steps");
  sol.affine = get_number(j, "affine");
  if (j.contains("cost_gap")) sol.cost_gap = get_number(j, "cost_gap");
  if (j.contains("dual_gap")) sol.dual_gap = get_number(j, "dual_gap");
  if (!j.at("stop_reason").is_string()) schema("'stop_reason' must be a string");
  sol.stop_reason = j.at("stop_reason").get<std::string>();
  return sol;
}

void write_solution(const SolutionFile& sol, const std::string& path) {
  write_text_file(path, solution_to_json(sol));
}

SolutionFile read_solution(const std::string& path) {
  return solution_from_json(read_text_file(path));
}

}  // namespace bala
