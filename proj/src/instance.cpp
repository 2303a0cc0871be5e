#include "mbqcqp/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "mbqcqp/random.hpp"

namespace mbqcqp {

using json = nlohmann::json;

std::string_view to_string(Field f) { return f == Field::Real ? "real" : "complex"; }
std::string_view to_string(ModelSense s) { return s == ModelSense::Minimize ? "min" : "max"; }

bool HermitianMatrix::is_real(double tol) const {
  return m_.size() == 0 || m_.imag().cwiseAbs().maxCoeff() <= tol;
}

double HermitianMatrix::hermitian_defect() const {
  if (m_.size() == 0) return 0.0;
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd HermitianMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double HermitianMatrix::quad_form(const CVector& w) const {
  return w.dot(m_ * w).real();
}

ValidationReport validate(const Instance& inst) {
  ValidationReport out;
  const int M = inst.M();
  if (M < 2) out.push_back({fmt::format("M = {} < 2", M), -1});
  if (inst.Q < 1 || inst.Q > M) out.push_back({fmt::format("Q out of range: Q = {}, M = {}", inst.Q, M), -1});
  if (!(inst.epsilon >= 0.0 && inst.epsilon <= 1.0))
    out.push_back({fmt::format("epsilon out of range: {}", inst.epsilon), -1});
  if (M == 0) return out;

  const int N = inst.N();
  if (N < 2) out.push_back({fmt::format("N = {} < 2", N), -1});
  for (int i = 0; i < M; ++i) {
    const auto& H = inst.matrices[static_cast<std::size_t>(i)];
    const auto& m = H.matrix();
    if (m.rows() != m.cols() || H.dim() != N) {
      out.push_back({fmt::format("dimension mismatch at index {}", i + 1), i + 1});
      continue;
    }
    if (!m.allFinite()) {
      out.push_back({fmt::format("non-finite entry at index {}", i + 1), i + 1});
      continue;
    }
    if (H.hermitian_defect() > kHermitianTol)
      out.push_back({fmt::format("not Hermitian at index {}", i + 1), i + 1});
    if (inst.field == Field::Real && !H.is_real())
      out.push_back({fmt::format("complex entries in real instance at index {}", i + 1), i + 1});
    const Eigen::VectorXd ev = H.eigenvalues();
    if (ev.size() > 0 && ev.minCoeff() < -kPsdRelTol * std::max(1.0, ev.maxCoeff()))
      out.push_back({fmt::format("not PSD at index {}", i + 1), i + 1});
  }
  return out;
}

std::string describe(const ValidationReport& report) {
  std::string s;
  for (const auto& v : report) {
    if (!s.empty()) s += "; ";
    s += v.what;
  }
  return s;
}

namespace {

double parse_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InstanceError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InstanceError(where + ": non-finite number");
  return v;
}

HermitianMatrix parse_matrix(const json& j, int idx, bool& saw_imag) {
  const std::string where = fmt::format("matrices[{}]", idx);
  if (!j.is_array() || j.empty()) throw InstanceError(where + ": expected a non-empty array of rows");
  const auto n = j.size();
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = j[r];
    if (!row.is_array()) throw InstanceError(fmt::format("{}[{}]: expected an array", where, r));
    if (row.size() != n)
      throw InstanceError(fmt::format("{}[{}]: dimension mismatch, row has {} entries but matrix has {} rows",
                                      where, r, row.size(), n));
    for (std::size_t c = 0; c < n; ++c) {
      const auto& e = row[c];
      const std::string ew = fmt::format("{}[{}][{}]", where, r, c);
      if (e.is_array()) {
        if (e.size() != 2) throw InstanceError(ew + ": complex entry must be [re, im]");
        const double im = parse_number(e[1], ew + "[1]");
        if (im != 0.0) saw_imag = true;
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex(parse_number(e[0], ew + "[0]"), im);
      } else {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex(parse_number(e, ew), 0.0);
      }
    }
  }
  return HermitianMatrix(std::move(m));
}

}  // namespace

Instance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InstanceError(fmt::format("malformed instance file: {}", e.what()));
  }
  if (!doc.is_object()) throw InstanceError("instance file must be a JSON object");
  for (const char* key : {"field", "model", "epsilon", "Q", "matrices"})
    if (!doc.contains(key)) throw InstanceError(fmt::format("missing field '{}'", key));

  Instance inst;
  const auto& f = doc["field"];
  if (f == "real") inst.field = Field::Real;
  else if (f == "complex") inst.field = Field::Complex;
  else throw InstanceError("field: expected \"real\" or \"complex\"");

  const auto& s = doc["model"];
  if (s == "min") inst.sense = ModelSense::Minimize;
  else if (s == "max") inst.sense = ModelSense::Maximize;
  else throw InstanceError("model: expected \"min\" or \"max\"");

  inst.epsilon = parse_number(doc["epsilon"], "epsilon");
  if (!doc["Q"].is_number_integer()) throw InstanceError("Q: expected an integer");
  inst.Q = doc["Q"].get<int>();

  const auto& mats = doc["matrices"];
  if (!mats.is_array()) throw InstanceError("matrices: expected an array");
  bool saw_imag = false;
  for (std::size_t i = 0; i < mats.size(); ++i)
    inst.matrices.push_back(parse_matrix(mats[i], static_cast<int>(i), saw_imag));
  for (std::size_t i = 1; i < inst.matrices.size(); ++i)
    if (inst.matrices[i].dim() != inst.matrices[0].dim())
      throw InstanceError(fmt::format("matrices[{}]: dimension mismatch, {} vs {}", i,
                                      inst.matrices[i].dim(), inst.matrices[0].dim()));
  if (inst.field == Field::Real && saw_imag)
    throw InstanceError("field is \"real\" but a matrix has a nonzero imaginary part");

  if (auto rep = validate(inst); !rep.empty())
    throw InstanceError("invalid instance: " + describe(rep));
  return inst;
}

std::string serialize_instance(const Instance& inst) {
  json doc;
  doc["field"] = to_string(inst.field);
  doc["model"] = to_string(inst.sense);
  doc["epsilon"] = inst.epsilon;
  doc["Q"] = inst.Q;
  json mats = json::array();
  for (const auto& H : inst.matrices) {
    json rows = json::array();
    const auto& m = H.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (inst.field == Field::Real) row.push_back(m(r, c).real());
        else row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
      }
      rows.push_back(std::move(row));
    }
    mats.push_back(std::move(rows));
  }
  doc["matrices"] = std::move(mats);
  return doc.dump(2);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

Instance generate_gaussian_instance(int M, int N, Field field, std::uint64_t seed, ModelSense sense,
                                    int Q, double epsilon) {
  if (M < 2 || N < 2) throw InstanceError("generate_gaussian_instance requires M >= 2 and N >= 2");
  auto eng = rng::stream(seed, "instance");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  Instance inst;
  inst.field = field;
  inst.sense = sense;
  inst.Q = Q;
  inst.epsilon = epsilon;
  inst.matrices.reserve(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    CVector h(N);
    for (int k = 0; k < N; ++k) {
      if (field == Field::Real) {
        h(k) = Complex(normal(eng), 0.0);
      } else {
        const double re = normal(eng);
        const double im = normal(eng);
        h(k) = Complex(re * inv_sqrt2, im * inv_sqrt2);
      }
    }
    inst.matrices.emplace_back(CMatrix(h * h.adjoint()));
  }
  return inst;
}

CVector Whitening::to_original(const CVector& w_hat) const {
  return V.triangularView<Eigen::Upper>().solve(w_hat);
}

Whitening whiten_objective(const HermitianMatrix& A, const Instance& inst) {
  const int n = A.dim();
  if (n != inst.N()) throw InstanceError("whiten_objective: dimension mismatch");
  if (A.hermitian_defect() > kHermitianTol) throw InstanceError("whiten_objective: A is not Hermitian");
  Eigen::LLT<CMatrix> llt(A.matrix());
  const Eigen::VectorXd ev = A.eigenvalues();
  if (llt.info() != Eigen::Success || ev.minCoeff() <= 0.0)
    throw InstanceError("whiten_objective: A is not positive definite");

  // A = L L^H, so V = L^H is upper triangular with V^H V = A.
  CMatrix V = llt.matrixU();
  Whitening out{inst, V};
  const auto Vt = V.triangularView<Eigen::Upper>();
  for (auto& H : out.instance.matrices) {
    // Vinv^H H Vinv, computed with two triangular solves
    CMatrix T = Vt.adjoint().solve(H.matrix());           // V^-H H
    CMatrix R = Vt.adjoint().solve(CMatrix(T.adjoint()));  // V^-H (H V^-1)
    R = 0.5 * (R + R.adjoint());
    H = HermitianMatrix(std::move(R));
  }
  return out;
}

}  // namespace mbqcqp
