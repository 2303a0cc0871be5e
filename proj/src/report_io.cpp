#include "mbqcqp/report_io.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include "json.hpp"

namespace mbqcqp {

using json = nlohmann::json;

namespace {

json scalar(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

json entry(Complex z, Field field) {
  if (field == Field::Real) return z.real();
  return json::array({z.real(), z.imag()});
}

json vector_json(const CVector& v, Field field) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(entry(v(i), field));
  return a;
}

json matrix_json(const CMatrix& m, Field field) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(entry(m(r, c), field));
    rows.push_back(std::move(row));
  }
  return rows;
}

json one_based(const std::vector<int>& idx) {
  json a = json::array();
  for (int i : idx) a.push_back(i + 1);
  return a;
}

json residuals_json(const conic::ResidualReport& r) {
  return {{"primal_infeasibility", r.primal_infeasibility},
          {"primal_infeasibility_rel", r.primal_infeasibility_rel},
          {"dual_infeasibility", r.dual_infeasibility},
          {"dual_infeasibility_rel", r.dual_infeasibility_rel},
          {"complementarity", r.complementarity},
          {"complementarity_rel", r.complementarity_rel},
          {"gap", r.gap},
          {"gap_rel", r.gap_rel}};
}

}  // namespace

std::string solution_json(const Instance& inst, const RelaxationSolution& sol) {
  json doc;
  doc["which"] = std::string(to_string(sol.which));
  doc["status"] = "optimal";
  doc["value"] = sol.value;
  doc["trace_value"] = sol.trace_value;
  doc["beta"] = std::vector<double>(sol.beta_bar.data(), sol.beta_bar.data() + sol.beta_bar.size());
  doc["X2"] = matrix_json(sol.X2.matrix(), inst.field);
  doc["iterations"] = sol.iterations;
  doc["residuals"] = residuals_json(sol.residuals);
  return doc.dump(2) + "\n";
}

std::string outcome_json(const Instance& inst, const RelaxationSolution& relax, const RoundingOutcome& out) {
  json doc;
  doc["model"] = std::string(to_string(inst.sense));
  doc["support"] = one_based(out.support);
  doc["x1"] = std::vector<int>(out.x1.data(), out.x1.data() + out.x1.size());
  doc["v_sdp"] = relax.value;
  doc["v_ubqp"] = scalar(out.v_ubqp);
  doc["unbounded"] = out.unbounded;
  doc["best_trial"] = out.best_index;
  doc["t"] = scalar(out.best.t);
  doc["x2"] = vector_json(out.best.x2, inst.field);
  doc["objective"] = scalar(out.best.objective);
  doc["feasible"] = out.best.feasible;
  if (!out.unbounded) {
    const FeasibilityReport fr = check_feasibility(inst, out.x1, out.best.x2);
    doc["slacks"] = fr.slack;
  }
  double sum = 0.0, lo = out.objectives.front(), hi = out.objectives.front();
  for (double v : out.objectives) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  doc["trials"] = {{"attempted", out.trials_attempted},
                   {"resampled", out.trials_resampled},
                   {"objective_min", scalar(lo)},
                   {"objective_max", scalar(hi)},
                   {"objective_mean", scalar(sum / static_cast<double>(out.objectives.size()))}};
  doc["rank"] = {{"before", out.rank_before}, {"after", out.rank_after}};
  return doc.dump(2) + "\n";
}

std::string bound_json(const BoundReport& b) {
  json doc;
  doc["model"] = std::string(to_string(b.sense));
  doc["field"] = std::string(to_string(b.field));
  doc["M"] = b.M;
  doc["Q"] = b.Q;
  doc["epsilon"] = b.epsilon;
  doc[b.sense == ModelSense::Minimize ? "c" : "c_tilde"] = b.c;
  if (b.K) doc["K"] = *b.K;
  doc["mu"] = b.mu;
  doc["active_branch"] = b.active_branch;
  if (!b.note.empty()) doc["note"] = b.note;
  if (b.empirical_ratio) {
    doc["empirical_ratio"] = *b.empirical_ratio;
    doc["certified"] = b.certified;
  }
  return doc.dump(2) + "\n";
}

std::string bound_table(const BoundReport& b) {
  std::string s;
  auto row = [&](std::string_view k, const std::string& v) { s += fmt::format("{:<16} {}\n", k, v); };
  row("model", std::string(to_string(b.sense)));
  row("field", std::string(to_string(b.field)));
  row("M", std::to_string(b.M));
  row("Q", std::to_string(b.Q));
  row("epsilon", fmt::format("{}", b.epsilon));
  row(b.sense == ModelSense::Minimize ? "c(eps)" : "c~(eps)", fmt::format("{:.10g}", b.c));
  if (b.K) row("K", fmt::format("{:.10g}", *b.K));
  row("mu", fmt::format("{:.10g}", b.mu));
  row("active branch", b.active_branch);
  if (!b.note.empty()) row("note", b.note);
  return s;
}

std::string oracle_json(const Instance& inst, const OracleResult& r) {
  json doc;
  doc["status"] = std::string(to_string(r.status));
  doc["value"] = scalar(r.value);
  doc["error_bound"] = r.error_bound;
  doc["support"] = one_based(r.support);
  doc["w"] = vector_json(r.w, inst.field);
  doc["grid"] = {{"resolution", r.grid},
                 {"shape", inst.field == Field::Real ? json::array({r.grid}) : json::array({r.grid + 1, 2 * r.grid})}};
  return doc.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mbqcqp
