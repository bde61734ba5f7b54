#include "csadapt/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csadapt/errors.hpp"

namespace csadapt {

namespace {

// Column norms computed with sequential_norm; zero columns are rejected.
std::vector<double> column_norms(const DenseMatrix& m, const char* what, const char* unit) {
  std::vector<double> norms(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double nrm = sequential_norm(m.col(j).data(), m.rows());
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
      throw DegenerateInputError(std::string(what) + ": " + unit + " " + std::to_string(j) + " is zero or not finite");
    }
    norms[static_cast<std::size_t>(j)] = nrm;
  }
  return norms;
}

void require_conformable(const DenseMatrix& phi, const DenseMatrix& psi, const char* what) {
  if (phi.cols() != psi.rows()) {
    throw DimensionError(std::string(what) + ": phi is " + std::to_string(phi.rows()) + "x" +
                         std::to_string(phi.cols()) + " but psi is " + std::to_string(psi.rows()) + "x" +
                         std::to_string(psi.cols()));
  }
}

}  // namespace

std::string_view to_string(PairLabel label) {
  switch (label) {
    case PairLabel::PhiPhi: return "phi_phi";
    case PairLabel::PhiPsi: return "phi_psi";
    case PairLabel::PsiPsi: return "psi_psi";
    case PairLabel::AA: return "a_a";
  }
  return "unknown";
}

PairLabel parse_pair_label(std::string_view text) {
  for (PairLabel l : {PairLabel::PhiPhi, PairLabel::PhiPsi, PairLabel::PsiPsi, PairLabel::AA})
    if (to_string(l) == text) return l;
  throw IoError("unknown pair label '" + std::string(text) + "'");
}

std::size_t CoherenceDistribution::count(PairLabel label) const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

double CoherenceDistribution::max() const noexcept {
  double best = 0.0;
  for (double v : values) best = std::max(best, v);
  return best;
}

double CoherenceDistribution::max(PairLabel label) const noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (labels[i] == label) best = std::max(best, values[i]);
  return best;
}

double CoherenceDistribution::quantile(double q) const {
  if (values.empty()) throw DegenerateInputError("quantile of an empty distribution");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile: q must lie in [0, 1]");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double sequential_norm(const double* x, Eigen::Index length) noexcept {
  double s = 0.0;
  for (Eigen::Index i = 0; i < length; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

double pair_coherence(const double* x, const double* y, Eigen::Index length, double norm_x, double norm_y) noexcept {
  double s = 0.0;
  for (Eigen::Index i = 0; i < length; ++i) s += x[i] * y[i];
  return std::abs(s) / (norm_x * norm_y);
}

double mutual_coherence(const DenseMatrix& a) {
  if (a.cols() < 2) throw DimensionError("mutual_coherence: need at least 2 columns, got " + std::to_string(a.cols()));
  const auto norms = column_norms(a, "mutual_coherence", "column");
  double best = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      best = std::max(best, pair_coherence(a.col(i).data(), a.col(j).data(), a.rows(), norms[i], norms[j]));
  return best;
}

double cross_coherence(const DenseMatrix& phi, const DenseMatrix& psi) {
  require_conformable(phi, psi, "cross_coherence");
  const DenseMatrix phi_t = phi.transpose();
  const auto row_norms = column_norms(phi_t, "cross_coherence", "row of phi");
  const auto psi_norms = column_norms(psi, "cross_coherence", "column of psi");
  double best = 0.0;
  for (Eigen::Index i = 0; i < phi_t.cols(); ++i)
    for (Eigen::Index j = 0; j < psi.cols(); ++j)
      best = std::max(best, pair_coherence(phi_t.col(i).data(), psi.col(j).data(), psi.rows(), row_norms[i], psi_norms[j]));
  return best;
}

CoherenceDistribution coherence_distribution_of_A(const DenseMatrix& a) {
  if (a.cols() < 2) throw DimensionError("coherence_distribution_of_A: need at least 2 columns");
  const auto norms = column_norms(a, "coherence_distribution_of_A", "column");
  CoherenceDistribution d;
  const auto l = static_cast<std::size_t>(a.cols());
  d.values.reserve(l * (l - 1) / 2);
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      d.values.push_back(pair_coherence(a.col(i).data(), a.col(j).data(), a.rows(), norms[i], norms[j]));
  d.labels.assign(d.values.size(), PairLabel::AA);
  return d;
}

CoherenceDistribution reduced_coherence_distribution(const DenseMatrix& phi, const DenseMatrix& psi) {
  require_conformable(phi, psi, "reduced_coherence_distribution");
  const DenseMatrix phi_t = phi.transpose();
  const auto row_norms = column_norms(phi_t, "reduced_coherence_distribution", "row of phi");
  const auto psi_norms = column_norms(psi, "reduced_coherence_distribution", "column of psi");
  const auto m = static_cast<std::size_t>(phi_t.cols());
  const auto l = static_cast<std::size_t>(psi.cols());
  const Eigen::Index n = psi.rows();

  CoherenceDistribution d;
  d.values.reserve(m * (m - 1) / 2 + m * l);
  d.labels.reserve(d.values.capacity());
  for (Eigen::Index i = 0; i < phi_t.cols(); ++i)
    for (Eigen::Index j = i + 1; j < phi_t.cols(); ++j) {
      d.values.push_back(pair_coherence(phi_t.col(i).data(), phi_t.col(j).data(), n, row_norms[i], row_norms[j]));
      d.labels.push_back(PairLabel::PhiPhi);
    }
  for (Eigen::Index i = 0; i < phi_t.cols(); ++i)
    for (Eigen::Index j = 0; j < psi.cols(); ++j) {
      d.values.push_back(pair_coherence(phi_t.col(i).data(), psi.col(j).data(), n, row_norms[i], psi_norms[j]));
      d.labels.push_back(PairLabel::PhiPsi);
    }
  return d;
}

std::vector<HistogramBin> histogram(const CoherenceDistribution& d, double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) {
    throw ConfigError("histogram: bin width must lie in (0, 1], got " + std::to_string(bin_width));
  }
  const auto bins = static_cast<std::size_t>(std::ceil(1.0 / bin_width - 1e-9));
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) out[b].center = (static_cast<double>(b) + 0.5) * bin_width;
  for (double v : d.values) {
    const double idx = std::floor(std::max(v, 0.0) / bin_width);
    const auto b = std::min(static_cast<std::size_t>(idx), bins - 1);
    ++out[b].count;
  }
  return out;
}

double welch_bound(Eigen::Index m, Eigen::Index l) {
  if (m < 1 || l <= m) {
    throw DimensionError("welch_bound: requires l > m >= 1, got m=" + std::to_string(m) + " l=" + std::to_string(l));
  }
  const double md = static_cast<double>(m);
  const double ld = static_cast<double>(l);
  return std::sqrt((ld - md) / (md * (ld - 1.0)));
}

}  // namespace csadapt
