#include "canprint/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "canprint/rng.hpp"

namespace canprint {

void validate(const LabeledDataset& data) {
    if (data.x.rows() == 0)
        throw std::invalid_argument("dataset: no rows");
    if (static_cast<std::size_t>(data.x.rows()) != data.y.size())
        throw std::invalid_argument("dataset: row count does not match label count");
    int n_classes = data.class_names.empty() ? 0 : static_cast<int>(data.class_names.size());
    for (int label : data.y) {
        if (label < 0)
            throw std::invalid_argument("dataset: negative class label");
        if (n_classes > 0 && label >= n_classes)
            throw std::invalid_argument("dataset: label outside class_names range");
    }
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
        n += static_cast<std::size_t>(layer_sizes[l]) * layer_sizes[l + 1] + layer_sizes[l + 1];
    return n;
}

MlpModel init_model(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("init_model: need at least input and output layers");
    for (int s : layer_sizes)
        if (s < 1)
            throw std::invalid_argument("init_model: all layer sizes must be >= 1");

    MlpModel model;
    model.layer_sizes = layer_sizes;
    model.seed = seed;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        int fan_in = layer_sizes[l];
        int fan_out = layer_sizes[l + 1];
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Eigen::MatrixXd w(fan_in, fan_out);
        for (int i = 0; i < fan_in; ++i)  // row-major fill order
            for (int j = 0; j < fan_out; ++j)
                w(i, j) = rng.uniform(-bound, bound);
        model.weights.push_back(std::move(w));
        model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    model.norm_mean = Eigen::VectorXd::Zero(layer_sizes.front());
    model.norm_std = Eigen::VectorXd::Ones(layer_sizes.front());
    return model;
}

Eigen::VectorXd pack_parameters(const MlpModel& model) {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(model.parameter_count()));
    Eigen::Index off = 0;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const auto& w = model.weights[l];
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                flat[off++] = w(i, j);
        const auto& b = model.biases[l];
        for (Eigen::Index j = 0; j < b.size(); ++j)
            flat[off++] = b[j];
    }
    return flat;
}

void unpack_parameters(const Eigen::VectorXd& flat, MlpModel& model) {
    if (flat.size() != static_cast<Eigen::Index>(model.parameter_count()))
        throw std::invalid_argument("unpack_parameters: size mismatch");
    Eigen::Index off = 0;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        auto& w = model.weights[l];
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                w(i, j) = flat[off++];
        auto& b = model.biases[l];
        for (Eigen::Index j = 0; j < b.size(); ++j)
            b[j] = flat[off++];
    }
}

namespace {

// Full-batch forward/backward over standardized inputs, with reusable
// workspaces so SCG epochs do not allocate.
class BatchEvaluator {
public:
    BatchEvaluator(const MlpModel& model, const LabeledDataset& data) : model_(model) {
        const Eigen::Index m = data.x.rows();
        const int in = model.input_size();
        const int out = model.output_size();
        if (data.x.cols() != in)
            throw std::invalid_argument("dataset feature width does not match model input size");
        for (int label : data.y)
            if (label >= out)
                throw std::invalid_argument("dataset label outside model output range");

        xz_.resize(m, in);
        for (Eigen::Index j = 0; j < in; ++j) {
            double mu = model.norm_mean[j];
            double sd = model.norm_std[j] != 0.0 ? model.norm_std[j] : 1.0;
            xz_.col(j) = (data.x.col(j).array() - mu) / sd;
        }
        onehot_ = Eigen::MatrixXd::Zero(m, out);
        for (Eigen::Index i = 0; i < m; ++i)
            onehot_(i, static_cast<Eigen::Index>(data.y[static_cast<std::size_t>(i)])) = 1.0;
        y_ = data.y;

        const auto& sizes = model.layer_sizes;
        acts_.resize(sizes.size());
        acts_[0] = xz_;
        for (std::size_t l = 1; l < sizes.size(); ++l)
            acts_[l].resize(m, sizes[l]);
        weights_ = model.weights;
        biases_ = model.biases;
        grad_w_.resize(weights_.size());
        grad_b_.resize(biases_.size());
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            grad_w_[l].resizeLike(weights_[l]);
            grad_b_[l].resizeLike(biases_[l]);
        }
    }

    Eigen::Index flat_size() const {
        Eigen::Index n = 0;
        for (std::size_t l = 0; l < weights_.size(); ++l)
            n += weights_[l].size() + biases_[l].size();
        return n;
    }

    double loss(const Eigen::VectorXd& flat) {
        load(flat);
        return run_forward();
    }

    double loss_and_grad(const Eigen::VectorXd& flat, Eigen::VectorXd& grad) {
        load(flat);
        double e = run_forward();
        run_backward();
        store_grad(grad);
        return e;
    }

private:
    void load(const Eigen::VectorXd& flat) {
        Eigen::Index off = 0;
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            auto& w = weights_[l];
            for (Eigen::Index i = 0; i < w.rows(); ++i)
                for (Eigen::Index j = 0; j < w.cols(); ++j)
                    w(i, j) = flat[off++];
            auto& b = biases_[l];
            for (Eigen::Index j = 0; j < b.size(); ++j)
                b[j] = flat[off++];
        }
    }

    void store_grad(Eigen::VectorXd& grad) const {
        grad.resize(flat_size());
        Eigen::Index off = 0;
        for (std::size_t l = 0; l < grad_w_.size(); ++l) {
            const auto& gw = grad_w_[l];
            for (Eigen::Index i = 0; i < gw.rows(); ++i)
                for (Eigen::Index j = 0; j < gw.cols(); ++j)
                    grad[off++] = gw(i, j);
            const auto& gb = grad_b_[l];
            for (Eigen::Index j = 0; j < gb.size(); ++j)
                grad[off++] = gb[j];
        }
    }

    // Returns mean cross-entropy; leaves softmax probabilities in the last
    // activation slot for the backward pass.
    double run_forward() {
        const std::size_t layers = weights_.size();
        const Eigen::Index m = xz_.rows();
        for (std::size_t l = 0; l < layers; ++l) {
            auto& z = acts_[l + 1];
            z.noalias() = acts_[l] * weights_[l];
            z.rowwise() += biases_[l].transpose();
            if (l + 1 < layers)
                z = z.array().tanh();
        }
        auto& z = acts_[layers];
        double total = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            double zmax = z.row(i).maxCoeff();
            double sum = (z.row(i).array() - zmax).exp().sum();
            double lse = zmax + std::log(sum);
            total += lse - z(i, static_cast<Eigen::Index>(y_[static_cast<std::size_t>(i)]));
            z.row(i) = (z.row(i).array() - lse).exp();  // probabilities, for backward
        }
        return total / static_cast<double>(m);
    }

    void run_backward() {
        const std::size_t layers = weights_.size();
        const double inv_m = 1.0 / static_cast<double>(xz_.rows());
        delta_ = (acts_[layers] - onehot_) * inv_m;
        for (std::size_t l = layers; l-- > 0;) {
            grad_w_[l].noalias() = acts_[l].transpose() * delta_;
            grad_b_[l] = delta_.colwise().sum();
            if (l > 0) {
                scratch_.noalias() = delta_ * weights_[l].transpose();
                delta_ = scratch_.array() * (1.0 - acts_[l].array().square());
            }
        }
    }

    const MlpModel& model_;
    Eigen::MatrixXd xz_, onehot_, delta_, scratch_;
    std::vector<int> y_;
    std::vector<Eigen::MatrixXd> acts_;
    std::vector<Eigen::MatrixXd> weights_, grad_w_;
    std::vector<Eigen::VectorXd> biases_, grad_b_;
};

void check_finite(double loss, const char* where) {
    if (!std::isfinite(loss))
        throw std::runtime_error(std::string("train_scg: non-finite loss during ") + where);
}

} // namespace

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.input_size())
        throw std::invalid_argument("forward: input size mismatch");
    Eigen::VectorXd a(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        double sd = model.norm_std[j] != 0.0 ? model.norm_std[j] : 1.0;
        a[j] = (x[j] - model.norm_mean[j]) / sd;
    }
    const std::size_t layers = model.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::VectorXd z = model.weights[l].transpose() * a + model.biases[l];
        if (l + 1 < layers) {
            a = z.array().tanh();
        } else {
            double zmax = z.maxCoeff();
            Eigen::VectorXd e = (z.array() - zmax).exp();
            a = e / e.sum();
        }
    }
    return a;
}

std::pair<double, Eigen::VectorXd> loss_and_gradient(const MlpModel& model,
                                                     const LabeledDataset& data) {
    validate(data);
    BatchEvaluator eval(model, data);
    Eigen::VectorXd grad;
    double loss = eval.loss_and_grad(pack_parameters(model), grad);
    return {loss, std::move(grad)};
}

TrainTrace train_scg(MlpModel& model, const LabeledDataset& data, const TrainConfig& cfg) {
    validate(data);
    if (cfg.max_epochs < 1)
        throw std::invalid_argument("train_scg: max_epochs must be >= 1");
    if (!(cfg.grad_tol > 0.0))
        throw std::invalid_argument("train_scg: grad_tol must be positive");

    // Standardization parameters from this dataset only (callers split first).
    const Eigen::Index m = data.x.rows();
    model.norm_mean = data.x.colwise().mean();
    Eigen::VectorXd var = (data.x.rowwise() - model.norm_mean.transpose())
                              .array()
                              .square()
                              .colwise()
                              .sum() /
                          static_cast<double>(m);
    model.norm_std = var.array().sqrt();
    for (Eigen::Index j = 0; j < model.norm_std.size(); ++j)
        if (model.norm_std[j] == 0.0) model.norm_std[j] = 1.0;
    if (!data.class_names.empty()) model.class_names = data.class_names;

    BatchEvaluator eval(model, data);
    const Eigen::Index dim = eval.flat_size();

    Eigen::VectorXd w = pack_parameters(model);
    Eigen::VectorXd g(dim), g_sigma(dim), g_old(dim);
    double loss = eval.loss_and_grad(w, g);
    check_finite(loss, "initial evaluation");

    Eigen::VectorXd p = -g;
    Eigen::VectorXd r = -g;
    Eigen::VectorXd w_trial(dim);
    double lambda = cfg.lambda0;
    double lambda_bar = 0.0;
    double delta = 0.0;
    bool success = true;

    TrainTrace trace;
    trace.loss.reserve(static_cast<std::size_t>(cfg.max_epochs));
    trace.grad_inf.reserve(static_cast<std::size_t>(cfg.max_epochs));
    trace.stop_reason = "max_epochs";
    model.seed = cfg.rng_seed;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        double p2 = p.squaredNorm();
        if (p2 == 0.0) {  // gradient vanished exactly
            trace.loss.push_back(loss);
            trace.grad_inf.push_back(0.0);
            trace.stop_reason = "grad_tol";
            model.epochs_run = epoch;
            break;
        }
        if (success) {
            double sigma = cfg.sigma0 / std::sqrt(p2);
            w_trial = w + sigma * p;
            double trial_loss = eval.loss_and_grad(w_trial, g_sigma);
            check_finite(trial_loss, "curvature probe");
            delta = p.dot((g_sigma - g) / sigma);
        }
        delta += (lambda - lambda_bar) * p2;
        if (delta <= 0.0) {
            lambda_bar = 2.0 * (lambda - delta / p2);
            delta = -delta + lambda * p2;
            lambda = lambda_bar;
        }
        double mu = p.dot(r);
        double alpha = mu / delta;
        w_trial = w + alpha * p;
        double new_loss = eval.loss(w_trial);
        check_finite(new_loss, "line step");
        double comparison = 2.0 * delta * (loss - new_loss) / (mu * mu);

        if (comparison >= 0.0) {
            w.swap(w_trial);
            loss = new_loss;
            g_old.swap(g);
            eval.loss_and_grad(w, g);
            r = -g;
            lambda_bar = 0.0;
            success = true;
            if (epoch % static_cast<int>(dim) == 0) {
                p = r;
            } else {
                double beta = (g.squaredNorm() - g.dot(g_old)) / mu;
                p = r + beta * p;
            }
            if (comparison >= 0.75) lambda *= 0.25;
        } else {
            lambda_bar = lambda;
            success = false;
        }
        if (comparison < 0.25) lambda += delta * (1.0 - comparison) / p2;

        double grad_inf = g.lpNorm<Eigen::Infinity>();
        trace.loss.push_back(loss);
        trace.grad_inf.push_back(grad_inf);
        model.epochs_run = epoch;
        if (grad_inf < cfg.grad_tol) {
            trace.stop_reason = "grad_tol";
            break;
        }
        if (lambda > 1e250) {  // no representable step can be accepted anymore
            trace.stop_reason = "stalled";
            break;
        }
    }

    unpack_parameters(w, model);
    model.final_loss = loss;
    model.final_grad_inf = trace.grad_inf.empty() ? g.lpNorm<Eigen::Infinity>() : trace.grad_inf.back();
    return trace;
}

std::pair<int, double> predict(const MlpModel& model, const Eigen::VectorXd& x) {
    Eigen::VectorXd p = forward(model, x);
    int best = 0;
    for (Eigen::Index i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = static_cast<int>(i);
    return {best, p[best]};
}

} // namespace canprint
