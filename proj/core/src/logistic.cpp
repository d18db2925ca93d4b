#include "empcal/logistic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "empcal/errors.hpp"

namespace empcal {
namespace {

// -log L_i = softplus(eta_i) - y_i * eta_i, with softplus(x) = log(1 + e^x)
// evaluated as max(x, 0) + log(1 + e^-|x|) so it never overflows. Plain log
// keeps full absolute accuracy here and vectorizes, unlike log1p.
double deviance_at(const Eigen::VectorXd& eta, const Eigen::VectorXd& y, const Eigen::VectorXd* w) {
  const Eigen::ArrayXd e = eta.array();
  const Eigen::ArrayXd terms = e.max(0.0) + (1.0 + (-e.abs()).exp()).log() - y.array() * e;
  return 2.0 * (w ? (terms * w->array()).sum() : terms.sum());
}

Eigen::VectorXd probabilities(const Eigen::VectorXd& eta) {
  // exp(-eta) may overflow to inf for very negative eta, which yields 0.
  return (1.0 + (-eta.array()).exp()).inverse().matrix();
}

// X' diag(w) X, one column pair at a time so each pass stays in cache.
Eigen::MatrixXd information(const Eigen::MatrixXd& x, const Eigen::VectorXd& working_weights) {
  const Eigen::Index k = x.cols();
  Eigen::MatrixXd a(k, k);
  Eigen::VectorXd xw(x.rows());
  for (Eigen::Index j = 0; j < k; ++j) {
    xw = x.col(j).cwiseProduct(working_weights);
    for (Eigen::Index l = 0; l <= j; ++l) a(j, l) = a(l, j) = xw.dot(x.col(l));
  }
  return a;
}

// Factorizes the information and rejects numerically singular systems.
Eigen::LDLT<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& a) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  const Eigen::VectorXd d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(dmax > 0.0) || d.minCoeff() <= dmax * 1e-13) {
    throw Error(ErrorKind::RankDeficient, "weighted normal equations are singular");
  }
  return ldlt;
}

}  // namespace

double logistic_log_likelihood(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& coefficients, const Eigen::VectorXd* weights) {
  return -0.5 * deviance_at(design * coefficients, y, weights);
}

LogisticFit fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const Eigen::VectorXd* weights, const LogisticOptions& options) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  if (n == 0 || k == 0 || y.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "fit_logistic: design and response are not conformable");
  }
  if (weights) {
    if (weights->size() != n) throw Error(ErrorKind::InvalidArgument, "fit_logistic: weight length mismatch");
    if (!(weights->array() > 0.0).all() || !weights->allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "fit_logistic: weights must be strictly positive and finite");
    }
  }

  LogisticFit fit;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(n, 0.5);
  double dev = deviance_at(eta, y, weights);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    fit.iterations_used = iter;
    Eigen::VectorXd working = mu.array() * (1.0 - mu.array());
    Eigen::VectorXd resid = y - mu;
    if (weights) {
      working.array() *= weights->array();
      resid.array() *= weights->array();
    }
    if (!(working.sum() > std::numeric_limits<double>::min() * static_cast<double>(n))) {
      throw Error(ErrorKind::SeparationDetected, "working weights underflowed");
    }
    const auto ldlt = factorize(information(x, working));
    Eigen::VectorXd step = ldlt.solve(x.transpose() * resid);

    // Newton step with halving until the deviance does not increase.
    Eigen::VectorXd beta_new = beta + step;
    Eigen::VectorXd eta_new = x * beta_new;
    double dev_new = deviance_at(eta_new, y, weights);
    for (int half = 0; half < 30 && !(std::isfinite(dev_new) && dev_new <= dev * (1.0 + 1e-12)); ++half) {
      step *= 0.5;
      beta_new = beta + step;
      eta_new = x * beta_new;
      dev_new = deviance_at(eta_new, y, weights);
    }
    if (!std::isfinite(dev_new)) throw Error(ErrorKind::NonConvergence, "deviance is not finite");

    const double change = std::abs(dev_new - dev) / (std::abs(dev_new) + 0.1);
    beta = std::move(beta_new);
    eta = std::move(eta_new);
    mu = probabilities(eta);
    dev = dev_new;

    if (beta.cwiseAbs().maxCoeff() > options.separation_threshold) {
      throw Error(ErrorKind::SeparationDetected,
                  "|coefficient| exceeded " + std::to_string(options.separation_threshold));
    }
    if (change < options.tol) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) {
    throw Error(ErrorKind::NonConvergence,
                "IRLS did not converge in " + std::to_string(options.max_iter) + " iterations");
  }

  Eigen::VectorXd working = mu.array() * (1.0 - mu.array());
  if (weights) working.array() *= weights->array();
  const Eigen::MatrixXd a = information(x, working);
  const auto ldlt = factorize(a);
  const Eigen::MatrixXd a_inv = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
  fit.model_covariance = 0.5 * (a_inv + a_inv.transpose());

  if (weights) {
    const Eigen::VectorXd score_weight = weights->array() * (y - mu).array();
    const Eigen::MatrixXd scores = x.array().colwise() * score_weight.array();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(k, k);
    b.selfadjointView<Eigen::Lower>().rankUpdate(scores.transpose());
    const Eigen::MatrixXd meat = b.selfadjointView<Eigen::Lower>();
    const Eigen::MatrixXd sandwich = fit.model_covariance * meat * fit.model_covariance;
    fit.robust_covariance = 0.5 * (sandwich + sandwich.transpose());
  }

  fit.coefficients = std::move(beta);
  fit.fitted = std::move(mu);
  fit.deviance = dev;
  return fit;
}

}  // namespace empcal
