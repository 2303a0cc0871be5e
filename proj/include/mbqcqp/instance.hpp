#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mbqcqp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class Field { Real, Complex };
enum class ModelSense { Minimize, Maximize };

std::string_view to_string(Field f);
std::string_view to_string(ModelSense s);

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hermitian matrix stored with complex entries; for real data the imaginary
// parts are all zero.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(CMatrix m) : m_(std::move(m)) {}
  static HermitianMatrix from_real(const Eigen::MatrixXd& m) {
    return HermitianMatrix(m.cast<Complex>());
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Eigen::MatrixXd real() const { return m_.real(); }
  bool is_real(double tol = 0.0) const;

  // max |H - H^H| entry
  double hermitian_defect() const;
  Eigen::VectorXd eigenvalues() const;

  // w^H H w (real by Hermitian symmetry)
  double quad_form(const CVector& w) const;

  friend bool operator==(const HermitianMatrix&, const HermitianMatrix&) = default;

 private:
  CMatrix m_;
};

struct Instance {
  Field field = Field::Real;
  ModelSense sense = ModelSense::Minimize;
  std::vector<HermitianMatrix> matrices;
  int Q = 1;
  double epsilon = 0.0;

  int M() const { return static_cast<int>(matrices.size()); }
  int N() const { return matrices.empty() ? 0 : matrices.front().dim(); }
};

constexpr double kHermitianTol = 1e-12;
constexpr double kPsdRelTol = 1e-9;

struct Violation {
  std::string what;
  int index = -1;  // 1-based matrix index, or -1 when not tied to a matrix
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate(const Instance& inst);
std::string describe(const ValidationReport& report);

// Instance file: JSON document with field/model/epsilon/Q/matrices.
Instance parse_instance(std::string_view text);
std::string serialize_instance(const Instance& inst);
Instance load_instance(const std::string& path);

// H_i = h_i h_i^H with standard normal (real) or unit-variance circular
// complex normal entries; deterministic in seed.
Instance generate_gaussian_instance(int M, int N, Field field, std::uint64_t seed,
                                    ModelSense sense = ModelSense::Minimize, int Q = 1,
                                    double epsilon = 0.0);

// Change of variables for the objective w^H A w, A > 0: with V^H V = A and
// w_hat = V w, constraints become w_hat^H (V^-H H V^-1) w_hat.
struct Whitening {
  Instance instance;
  CMatrix V;

  CVector to_original(const CVector& w_hat) const;
  CVector to_whitened(const CVector& w) const { return V * w; }
};

Whitening whiten_objective(const HermitianMatrix& A, const Instance& inst);

}  // namespace mbqcqp
