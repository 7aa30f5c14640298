#include "lexblend/optimize.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "lexblend/errors.hpp"

namespace lexblend {

std::vector<PreparedStep> prepare_steps(const Model& model, std::span<const TrainStep> steps) {
  std::vector<PreparedStep> out;
  out.reserve(steps.size());
  for (const auto& s : steps) {
    if (s.correct_index >= s.gap.candidates.size())
      throw std::invalid_argument("correct index outside the candidate list");
    out.push_back({extract_features(model, s.gap), s.correct_index});
  }
  return out;
}

double step_error(double theta_c) {
  const double miss = 1.0 - theta_c;
  return 0.5 * miss * miss;
}

double grad_alpha(double bayes_c, double lsa_c, double theta_c) {
  return -(1.0 - theta_c) * (bayes_c - lsa_c);
}

double grad_lambda(const LambdaGradInput& in, std::size_t x) {
  const std::size_t m = in.terms.size();
  if (x == 0 || x >= m) throw std::out_of_range("lambda index outside 1 .. m-1");
  if (in.lambdas.size() < m - 1) throw std::invalid_argument("too few lambdas for the context");
  for (const double t : in.terms)
    if (!(t > 0.0)) throw DegenerateTerm();
  double others = 1.0;
  for (std::size_t y = 1; y < m; ++y)
    if (y != x) others *= in.lambdas[y - 1];
  const double lx = in.lambdas[x - 1];
  const double bracket = std::log(in.terms[x]) - std::log(in.terms[0]) / (lx * lx * others);
  return -in.alpha * (1.0 - in.theta) * in.weighted_over_gamma * bracket;
}

std::vector<double> grad_lambdas(const LambdaGradInput& in) {
  std::vector<double> g(in.lambdas.size(), 0.0);
  for (std::size_t x = 1; x < in.terms.size(); ++x) g[x - 1] = grad_lambda(in, x);
  return g;
}

std::pair<ModelParams, OptTrace> run_optimization(std::span<const PreparedStep> steps,
                                                  ModelParams params, std::size_t epochs) {
  if (epochs > 0 && steps.empty()) throw std::invalid_argument("no optimization steps");
  params.clamp();
  OptTrace trace;
  trace.epoch_error.reserve(epochs);
  trace.steps.reserve(epochs * steps.size());

  std::vector<double> before_terms;
  std::vector<double> after_terms;
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    double summed = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const GapFeatures& f = steps[i].features;
      const std::size_t c = steps[i].correct_index;
      const GapScores scores = score_gap(f, params);
      const double theta = scores.theta[c];
      const double error = step_error(theta);
      summed += error;

      const double g_alpha = grad_alpha(scores.bayes[c], scores.lsa[c], theta);

      before_terms.resize(f.before.size());
      for (std::size_t d = 0; d < f.before.size(); ++d) before_terms[d] = f.before[d][c];
      after_terms.resize(f.after.size());
      for (std::size_t d = 0; d < f.after.size(); ++d) after_terms[d] = f.after[d][c];

      const double p = scores.bayes_prob[c];
      const auto g_before = grad_lambdas({params.alpha, theta, p, before_terms, params.lambda_before});
      const auto g_after = grad_lambdas({params.alpha, theta, p, after_terms, params.lambda_after});

      params.alpha -= g_alpha * params.eta_alpha;
      for (std::size_t x = 0; x < g_before.size(); ++x)
        params.lambda_before[x] -= g_before[x] * params.eta_lambda;
      for (std::size_t x = 0; x < g_after.size(); ++x)
        params.lambda_after[x] -= g_after[x] * params.eta_lambda;
      params.clamp();

      trace.steps.push_back(
          {epoch, i + 1, error, params.alpha, params.lambda_before, params.lambda_after});
    }
    trace.epoch_error.push_back(summed);
  }
  return {std::move(params), std::move(trace)};
}

void write_trace_csv(std::ostream& out, const OptTrace& trace) {
  const std::size_t nb = trace.steps.empty() ? 0 : trace.steps.front().lambda_before.size();
  const std::size_t na = trace.steps.empty() ? 0 : trace.steps.front().lambda_after.size();
  out << "epoch,step,error,alpha";
  for (std::size_t x = 1; x <= nb; ++x) out << ",lambda_b" << x;
  for (std::size_t x = 1; x <= na; ++x) out << ",lambda_a" << x;
  out << '\n' << std::setprecision(17);
  for (const auto& s : trace.steps) {
    out << s.epoch << ',' << s.step << ',' << s.error << ',' << s.alpha;
    for (const double l : s.lambda_before) out << ',' << l;
    for (const double l : s.lambda_after) out << ',' << l;
    out << '\n';
  }
}

void write_epoch_csv(std::ostream& out, const OptTrace& trace) {
  out << "epoch,error\n" << std::setprecision(17);
  for (std::size_t e = 0; e < trace.epoch_error.size(); ++e)
    out << e + 1 << ',' << trace.epoch_error[e] << '\n';
}

}  // namespace lexblend
