#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "lexblend/inference.hpp"

namespace lexblend {

inline constexpr double kDefaultEtaAlpha = 0.1;
inline constexpr double kDefaultEtaLambda = 0.05;
inline constexpr std::size_t kDefaultEpochs = 30;

struct TrainStep {
  GapContext gap;
  std::size_t correct_index = 0;
};

// A TrainStep with its parameter-independent features already extracted.
struct PreparedStep {
  GapFeatures features;
  std::size_t correct_index = 0;
};

std::vector<PreparedStep> prepare_steps(const Model& model, std::span<const TrainStep> steps);

// E = 1/2 (1 - theta_c)^2
double step_error(double theta_c);

// dE/dalpha = -(1 - theta_c)(B_c - L_c)
double grad_alpha(double bayes_c, double lsa_c, double theta_c);

// Inputs for the lambda derivative on one side of the gap, all taken for
// the correct candidate. Equalized terms are constants here: the gradient
// differentiates only the exponents, with gamma fixed for the step.
struct LambdaGradInput {
  double alpha = 0.0;
  double theta = 0.0;
  double weighted_over_gamma = 0.0;  // weighted Bayes product / gamma
  std::span<const double> terms;     // t_0 .. t_{m-1}, nearest first
  std::span<const double> lambdas;   // lambda_1 .. ; at least m - 1 entries
};

// dE/dlambda_x = -alpha (1 - theta) (P / gamma) (ln t_x - ln t_0 / (lambda_x^2 prod_{y != x} lambda_y))
// for 1 <= x < m. Throws DegenerateTerm when any term is <= 0.
double grad_lambda(const LambdaGradInput& in, std::size_t x);

// Gradient for every lambda of the side; entries with x >= m are zero.
std::vector<double> grad_lambdas(const LambdaGradInput& in);

struct OptTrace {
  struct Step {
    std::size_t epoch = 0;  // 1-based
    std::size_t step = 0;   // 1-based within the epoch
    double error = 0.0;     // error before this step's update
    double alpha = 0.0;     // parameters after the update
    std::vector<double> lambda_before;
    std::vector<double> lambda_after;
  };
  std::vector<double> epoch_error;  // summed step error per epoch
  std::vector<Step> steps;
};

// Cyclic gradient descent over `steps` for `epochs` passes. Each step
// computes gradients at its start, then updates alpha and every lambda,
// clamping alpha to [0, 1] and lambdas to [kLambdaMin, kLambdaMax].
std::pair<ModelParams, OptTrace> run_optimization(std::span<const PreparedStep> steps,
                                                  ModelParams params, std::size_t epochs);

void write_trace_csv(std::ostream& out, const OptTrace& trace);
void write_epoch_csv(std::ostream& out, const OptTrace& trace);

}  // namespace lexblend
