#include "tbq/tomography.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "tbq/errors.hpp"

namespace tbq::tomo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxIterations = 100;

}  // namespace

double wrap(double phase) {
  double p = std::remainder(phase, 2.0 * kPi);
  if (p <= -kPi) p += 2.0 * kPi;
  return p;
}

FringeFit fit_fringe(const measure::FringeScan& scan, Weighting weighting) {
  std::vector<double> counts(scan.middle_counts.begin(), scan.middle_counts.end());
  return fit_fringe(scan.phases, counts, weighting);
}

FringeFit fit_fringe(const std::vector<double>& phases, const std::vector<double>& counts,
                     Weighting weighting) {
  if (phases.size() != counts.size()) throw ConfigError({"fringe: phases and counts differ in length"});
  if (phases.size() < 4) throw ConfigError({"fringe: need at least 4 phase points for a 3-parameter fit"});

  const auto n = static_cast<Eigen::Index>(phases.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::cos(phases[static_cast<std::size_t>(i)]);
    X(i, 2) = std::sin(phases[static_cast<std::size_t>(i)]);
    y(i) = counts[static_cast<std::size_t>(i)];
  }

  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = weighting == Weighting::Poisson ? 1.0 / std::max(y(i), 1.0) : 1.0;

  FringeFit fit;
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();
  Eigen::Matrix3d normal;
  for (int it = 1;; ++it) {
    normal = X.transpose() * w.asDiagonal() * X;
    const Eigen::Vector3d next = normal.ldlt().solve(X.transpose() * w.asDiagonal() * y);
    const double change = (next - beta).norm();
    beta = next;
    fit.iterations = it;
    if (weighting == Weighting::Uniform) break;
    const Eigen::VectorXd model = X * beta;
    for (Eigen::Index i = 0; i < n; ++i) w(i) = 1.0 / std::max(model(i), 0.5);
    if (change <= 1e-12 * std::max(1.0, beta.norm())) break;
    if (it >= kMaxIterations) {
      const double rss = (w.array() * (y - X * beta).array().square()).sum();
      throw FitError("fit_fringe: Poisson reweighting did not converge", rss);
    }
  }

  const Eigen::VectorXd resid = y - X * beta;
  fit.chi2 = (w.array() * resid.array().square()).sum();

  const double a = beta(0), b = beta(1), c = beta(2);
  if (!(a > 0.0)) throw FitError("fit_fringe: non-positive fitted offset", fit.chi2);
  const double r = std::hypot(b, c);

  Eigen::Matrix3d cov = normal.inverse();
  if (weighting == Weighting::Uniform) cov *= n > 3 ? fit.chi2 / static_cast<double>(n - 3) : 0.0;

  fit.offset = a;
  fit.offset_error = std::sqrt(std::max(cov(0, 0), 0.0));
  if (r <= 1e-12 * a) {
    fit.phase_defined = false;
    fit.visibility_error = std::sqrt(std::max(cov(1, 1), 0.0)) / a;
    return fit;
  }
  fit.visibility = std::clamp(r / a, 0.0, 1.0);
  fit.phase = wrap(std::atan2(-c, b));

  const Eigen::Vector3d dv(-r / (a * a), b / (a * r), c / (a * r));
  const Eigen::Vector3d dphi(0.0, c / (r * r), -b / (r * r));
  fit.visibility_error = std::sqrt(std::max(dv.dot(cov * dv), 0.0));
  fit.phase_error = std::sqrt(std::max(dphi.dot(cov * dphi), 0.0));
  return fit;
}

BlochVector reconstruct(double p_early, double p_late, double visibility, double phase) {
  const double total = p_early + p_late;
  if (!(total > 0.0)) throw std::domain_error("reconstruct: no photon population");
  const double q0 = p_early / total;
  const double q1 = 1.0 - q0;
  const double v = std::clamp(visibility, 0.0, 1.0);
  const std::complex<double> rho01 = std::polar(v * std::sqrt(q0 * q1), -phase);
  return {2.0 * rho01.real(), -2.0 * rho01.imag(), q0 - q1};
}

double coherence_from_fringe(double fringe_visibility, double p_early, double p_late) {
  const double total = p_early + p_late;
  if (!(total > 0.0)) throw std::domain_error("coherence_from_fringe: no photon population");
  const double balance = 2.0 * std::sqrt(p_early * p_late) / total;
  if (!(balance > 0.0)) return 0.0;
  return std::clamp(fringe_visibility / balance, 0.0, 1.0);
}

double fidelity(const BlochVector& measured, const BlochVector& target) {
  if (std::abs(target.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("fidelity: target must be a pure state (unit Bloch vector)");
  return 0.5 * (1.0 + measured.dot(target));
}

double state_fidelity(const BlochVector& a, const BlochVector& b) {
  const double ra = std::max(0.0, 1.0 - a.dot(a));
  const double rb = std::max(0.0, 1.0 - b.dot(b));
  return 0.5 * (1.0 + a.dot(b) + std::sqrt(ra * rb));
}

std::vector<double> unwrap(const std::vector<double>& phases) {
  std::vector<double> out;
  out.reserve(phases.size());
  double shift = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (i > 0) {
      const double step = phases[i] + shift - out.back();
      if (step > kPi) shift -= 2.0 * kPi * std::round(step / (2.0 * kPi));
      else if (step < -kPi) shift += 2.0 * kPi * std::round(-step / (2.0 * kPi));
    }
    out.push_back(phases[i] + shift);
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<ReconstructedState>& states) {
  out << "x,y,z,fidelity,visibility,phase_rad\n";
  for (const auto& s : states)
    out << format_double(s.bloch.x) << ',' << format_double(s.bloch.y) << ',' << format_double(s.bloch.z)
        << ',' << format_double(s.fidelity) << ',' << format_double(s.visibility) << ','
        << format_double(s.phase) << '\n';
}

}  // namespace tbq::tomo
