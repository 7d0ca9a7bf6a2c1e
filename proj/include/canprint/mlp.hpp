#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace canprint {

struct LabeledDataset {
    Eigen::MatrixXd x;                     // rows = samples, cols = features
    std::vector<int> y;                    // class labels in [0, n_classes)
    std::vector<std::string> class_names;  // label -> display name
};

void validate(const LabeledDataset& data);

// Feed-forward classifier: tanh hidden layers, softmax output. Inputs are
// standardized with the stored per-feature mean/std before the first layer.
struct MlpModel {
    std::vector<int> layer_sizes;
    std::vector<Eigen::MatrixXd> weights;  // weights[l] is layer_sizes[l] x layer_sizes[l+1]
    std::vector<Eigen::VectorXd> biases;
    Eigen::VectorXd norm_mean;             // identity (0 mean, unit std) until trained
    Eigen::VectorXd norm_std;
    std::vector<std::string> class_names;

    // training metadata
    std::uint64_t seed = 0;
    int epochs_run = 0;
    double final_loss = 0.0;
    double final_grad_inf = 0.0;

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    std::size_t parameter_count() const;
};

struct TrainConfig {
    int max_epochs = 2000;
    double grad_tol = 1e-7;     // infinity norm of the full-batch gradient
    std::uint64_t rng_seed = 0;
    double sigma0 = 1e-4;       // SCG finite-difference step scale
    double lambda0 = 1e-6;      // initial SCG regularization
};

struct TrainTrace {
    std::vector<double> loss;      // per epoch
    std::vector<double> grad_inf;  // per epoch
    std::string stop_reason;       // "max_epochs", "grad_tol" or "stalled"
};

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
MlpModel init_model(const std::vector<int>& layer_sizes, std::uint64_t seed);

// Class probabilities for one input row (standardization applied inside).
Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x);

// Mean cross-entropy over the dataset and its gradient, flattened in
// [W0 row-major, b0, W1 row-major, b1, ...] order.
std::pair<double, Eigen::VectorXd> loss_and_gradient(const MlpModel& model,
                                                     const LabeledDataset& data);

// Flat parameter packing in the order documented above.
Eigen::VectorXd pack_parameters(const MlpModel& model);
void unpack_parameters(const Eigen::VectorXd& flat, MlpModel& model);

// Full-batch scaled conjugate gradient (Moller). Computes and stores the
// standardization parameters from the given dataset, then trains in place.
// Stops after max_epochs epochs or once the gradient infinity norm drops
// below grad_tol, whichever comes first. Throws on non-finite loss.
TrainTrace train_scg(MlpModel& model, const LabeledDataset& data, const TrainConfig& cfg);

// argmax class and its probability; ties break toward the lowest index.
std::pair<int, double> predict(const MlpModel& model, const Eigen::VectorXd& x);

} // namespace canprint
