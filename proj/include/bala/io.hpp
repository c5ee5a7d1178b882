#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "bala/conic_problem.hpp"
#include "bala/solver.hpp"

namespace bala {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

// Problem file (JSON, format_version "1"):
//   {"format_version": "1",
//    "cone": {"type": "nonneg_l1" | "soc_bound", "n": .., "a": ..}
//          | {"type": "psd_trace", "nbar": .., "gamma": ..},
//    "c": [..], "b": [..], "A": [[row, col, value], ..]   (1-based),
//    "certificate": {"p_star": .., "x_star": [..], "y_star": [..],
//                    "g_star": .., "witness_only": bool}   (optional),
//    "metadata": {"key": number, ..}                         (optional)}
std::string problem_to_json(const ConicProblem& prob);
ConicProblem problem_from_json(const std::string& text);
void write_problem(const ConicProblem& prob, const std::string& path);
ConicProblem read_problem(const std::string& path);

/// SDPA sparse format with one semidefinite block. The SDPA dual
/// max <F0, Y> s.t. <Fi, Y> = ci becomes min <-F0, X> s.t. <Fi, X> = ci
/// with tr X <= trace_bound.
ConicProblem sdpa_from_string(const std::string& text, double trace_bound);
ConicProblem read_sdpa(const std::string& path, double trace_bound);

// Trace CSV.
inline constexpr const char* kTraceHeader = "k,step,g_y,g_z,gk_z,affine,cost_gap,dual_gap,wall_ms";

/// Without timing the wall_ms field is left empty (reproducible output).
std::string format_trace_row(const IterationRecord& rec, bool with_time = true);
IterationRecord parse_trace_row(const std::string& line);

class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path, bool with_time = true);
  void write(const IterationRecord& rec);

 private:
  std::ofstream out_;
  std::string path_;
  bool with_time_ = true;
};

std::vector<IterationRecord> read_trace(const std::string& path);

struct SolutionFile {
  Vec x;
  Vec y;
  Vec x_average;
  std::size_t iterations = 0;
  std::size_t descent_steps = 0;
  std::size_t null_steps = 0;
  double affine = 0.0;
  std::optional<double> cost_gap;
  std::optional<double> dual_gap;
  std::string stop_reason;
};

SolutionFile make_solution(const ConicProblem& prob, const SolveResult& result);
std::string solution_to_json(const SolutionFile& sol);
SolutionFile solution_from_json(const std::string& text);
void write_solution(const SolutionFile& sol, const std::string& path);
SolutionFile read_solution(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace bala
