#include "geokp/mlp.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <sstream>
#include <stdexcept>

namespace geokp {

HipFeatures build_features(const std::map<std::string, Vec3>& joints, const HipBoneTable& table,
                           const std::optional<Vec3>& highest_point) {
    auto get = [&](const std::string& name) {
        auto it = joints.find(name);
        if (it == joints.end()) throw std::runtime_error("build_features: missing joint '" + name + "'");
        return it->second;
    };
    HipFeatures feats;
    Vec3 hip = get(table.hip_joint);
    if (highest_point) hip.z() = highest_point->z();
    feats.values.segment<3>(0) = hip;
    for (std::size_t b = 0; b < 3; ++b) {
        Vec3 vec = get(table.bones[b].joint_b) - get(table.bones[b].joint_a);
        feats.values(3 + static_cast<Eigen::Index>(b)) = vec.norm();
        feats.values.segment<3>(6 + 3 * static_cast<Eigen::Index>(b)) = vec;
    }
    return feats;
}

MlpModel MlpModel::make(int input_dim, uint64_t seed) {
    const std::vector<int> widths = {input_dim, 9, 7, 5, 1};
    MlpModel model;
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        double bound = std::sqrt(6.0 / widths[l]);  // He-style, fan-in
        std::uniform_real_distribution<double> dist(-bound, bound);
        Eigen::MatrixXd w(widths[l + 1], widths[l]);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
        model.weights.push_back(w);
        model.biases.push_back(Eigen::VectorXd::Zero(widths[l + 1]));
    }
    return model;
}

namespace {

struct ForwardTrace {
    std::vector<Eigen::VectorXd> pre;   // pre-activations per layer
    std::vector<Eigen::VectorXd> post;  // post-activations (post[0] = input)
};

double forward_traced(const MlpModel& model, const Eigen::VectorXd& x, ForwardTrace* trace) {
    Eigen::VectorXd h = x;
    if (trace) trace->post.push_back(h);
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        Eigen::VectorXd z = model.weights[l] * h + model.biases[l];
        if (trace) trace->pre.push_back(z);
        h = (l + 1 < model.weights.size()) ? z.cwiseMax(0.0) : z;
        if (trace) trace->post.push_back(h);
    }
    return h(0);
}

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    static Gradients zeros_like(const MlpModel& model) {
        Gradients g;
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
            g.weights.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
            g.biases.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
        }
        return g;
    }
};

// accumulates d(loss)/d(params) for one sample into g, where loss is the
// squared-error term (pred - target)^2 before the 1/n mean factor
void backprop(const MlpModel& model, const Eigen::VectorXd& x, double target, Gradients& g) {
    ForwardTrace trace;
    double pred = forward_traced(model, x, &trace);
    const int layers = static_cast<int>(model.weights.size());
    Eigen::VectorXd delta(1);
    delta(0) = 2.0 * (pred - target);
    for (int l = layers - 1; l >= 0; --l) {
        g.weights[l] += delta * trace.post[l].transpose();
        g.biases[l] += delta;
        if (l > 0) {
            Eigen::VectorXd up = model.weights[l].transpose() * delta;
            delta = (trace.pre[l - 1].array() > 0).select(up, 0.0);
        }
    }
}

}  // namespace

double forward(const MlpModel& model, const Eigen::VectorXd& features) {
    if (features.size() != model.input_dim())
        throw std::runtime_error("mlp forward: feature dimension mismatch");
    return forward_traced(model, features, nullptr);
}

TrainResult train_adam(const MlpModel& init, const Dataset& data, const TrainConfig& config) {
    if (data.features.rows() == 0) throw std::runtime_error("train_adam: empty dataset");
    if (data.features.cols() != init.input_dim())
        throw std::runtime_error("train_adam: feature width does not match model input");
    if (data.targets.size() != data.features.rows())
        throw std::runtime_error("train_adam: target count does not match samples");
    if (!data.targets.allFinite()) throw std::runtime_error("train_adam: non-finite targets");
    if (config.learning_rate < 0 || config.beta1 <= 0 || config.beta1 >= 1 || config.beta2 <= 0 ||
        config.beta2 >= 1)
        throw std::runtime_error("train_adam: invalid hyperparameters");

    TrainResult result;
    result.model = init;
    const int n = static_cast<int>(data.features.rows());

    Gradients m = Gradients::zeros_like(init), v = Gradients::zeros_like(init);
    double beta1_t = 1.0, beta2_t = 1.0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Gradients g = Gradients::zeros_like(result.model);
        double loss = 0;
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd x = data.features.row(i).transpose();
            double pred = forward_traced(result.model, x, nullptr);
            loss += (pred - data.targets(i)) * (pred - data.targets(i));
            backprop(result.model, x, data.targets(i), g);
        }
        loss /= n;
        result.loss_trace.push_back(loss);
        if (!std::isfinite(loss)) throw std::runtime_error("train_adam: loss diverged");

        beta1_t *= config.beta1;
        beta2_t *= config.beta2;
        for (std::size_t l = 0; l < result.model.weights.size(); ++l) {
            auto update = [&](Eigen::MatrixXd& param, Eigen::MatrixXd& m_l, Eigen::MatrixXd& v_l,
                              const Eigen::MatrixXd& grad_sum) {
                Eigen::MatrixXd grad = grad_sum / n;
                m_l = config.beta1 * m_l + (1 - config.beta1) * grad;
                v_l = config.beta2 * v_l + (1 - config.beta2) * grad.cwiseProduct(grad);
                Eigen::MatrixXd m_hat = m_l / (1 - beta1_t);
                Eigen::MatrixXd v_hat = v_l / (1 - beta2_t);
                param.array() -=
                    config.learning_rate * m_hat.array() / (v_hat.array().sqrt() + config.eps);
            };
            update(result.model.weights[l], m.weights[l], v.weights[l], g.weights[l]);
            Eigen::MatrixXd bias_as_mat = result.model.biases[l], mb = m.biases[l], vb = v.biases[l];
            update(bias_as_mat, mb, vb, g.biases[l]);
            result.model.biases[l] = bias_as_mat;
            m.biases[l] = mb;
            v.biases[l] = vb;
        }
    }
    return result;
}

double gradient_check(const MlpModel& model, const Eigen::VectorXd& features, double target) {
    Gradients analytic = Gradients::zeros_like(model);
    backprop(model, features, target, analytic);

    const double step = 1e-5;
    double max_rel = 0;
    MlpModel probe = model;
    auto loss_at = [&]() {
        double pred = forward_traced(probe, features, nullptr);
        return (pred - target) * (pred - target);
    };
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        auto check_param = [&](double& p, double analytic_g) {
            double saved = p;
            p = saved + step;
            double plus = loss_at();
            p = saved - step;
            double minus = loss_at();
            p = saved;
            double fd = (plus - minus) / (2 * step);
            double scale = std::max({std::abs(fd), std::abs(analytic_g), 1e-8});
            max_rel = std::max(max_rel, std::abs(fd - analytic_g) / scale);
        };
        for (Eigen::Index i = 0; i < model.weights[l].rows(); ++i)
            for (Eigen::Index j = 0; j < model.weights[l].cols(); ++j)
                check_param(probe.weights[l](i, j), analytic.weights[l](i, j));
        for (Eigen::Index i = 0; i < model.biases[l].size(); ++i)
            check_param(probe.biases[l](i), analytic.biases[l](i));
    }
    return max_rel;
}

LooResult leave_one_out(const Dataset& data, const TrainConfig& config, int workers) {
    const int n = static_cast<int>(data.features.rows());
    if (n < 2) throw std::runtime_error("leave_one_out: need at least 2 samples");

    LooResult result;
    result.predictions.resize(n);

    auto run_fold = [&](int hold) {
        Dataset fold;
        fold.features.resize(n - 1, data.features.cols());
        fold.targets.resize(n - 1);
        int row = 0;
        for (int i = 0; i < n; ++i) {
            if (i == hold) continue;
            fold.features.row(row) = data.features.row(i);
            fold.targets(row) = data.targets(i);
            ++row;
        }
        MlpModel init = MlpModel::make(static_cast<int>(data.features.cols()), config.seed);
        auto trained = train_adam(init, fold, config);
        return forward(trained.model, data.features.row(hold).transpose());
    };

    if (workers > 1) {
        std::vector<std::future<double>> futures;
        for (int hold = 0; hold < n; ++hold)
            futures.push_back(std::async(std::launch::async, run_fold, hold));
        for (int hold = 0; hold < n; ++hold) result.predictions(hold) = futures[hold].get();
    } else {
        for (int hold = 0; hold < n; ++hold) result.predictions(hold) = run_fold(hold);
    }

    double mean = data.targets.mean();
    double ss_tot = (data.targets.array() - mean).square().sum();
    double ss_res = (data.targets - result.predictions).squaredNorm();
    result.rmse = std::sqrt(ss_res / n);
    if (ss_tot <= 0) {
        result.r2_defined = false;
    } else {
        result.r2 = 1.0 - ss_res / ss_tot;
    }
    return result;
}

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_dataset_csv: empty file " + path);
    std::vector<std::string> columns;
    {
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) columns.push_back(cell);
    }
    int target_col = -1;
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c] == "hip_height") target_col = static_cast<int>(c);
    if (target_col < 0) throw std::runtime_error("load_dataset_csv: missing hip_height column");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != columns.size())
            throw std::runtime_error("load_dataset_csv: ragged row in " + path);
        rows.push_back(row);
    }
    Dataset data;
    data.features.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(columns.size()) - 1);
    data.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        int fc = 0;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (static_cast<int>(c) == target_col)
                data.targets(static_cast<Eigen::Index>(i)) = rows[i][c];
            else
                data.features(static_cast<Eigen::Index>(i), fc++) = rows[i][c];
        }
    }
    return data;
}

void save_model(const MlpModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    out.precision(17);
    out << "layers " << model.weights.size() << "\n";
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        out << "layer " << model.weights[l].rows() << " " << model.weights[l].cols() << "\n";
        for (Eigen::Index i = 0; i < model.weights[l].rows(); ++i) {
            for (Eigen::Index j = 0; j < model.weights[l].cols(); ++j)
                out << model.weights[l](i, j) << (j + 1 < model.weights[l].cols() ? " " : "\n");
        }
        for (Eigen::Index i = 0; i < model.biases[l].size(); ++i)
            out << model.biases[l](i) << (i + 1 < model.biases[l].size() ? " " : "\n");
    }
}

MlpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    std::string tag;
    std::size_t layers;
    in >> tag >> layers;
    if (tag != "layers") throw std::runtime_error("load_model: malformed file " + path);
    MlpModel model;
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::Index rows, cols;
        in >> tag >> rows >> cols;
        if (tag != "layer") throw std::runtime_error("load_model: malformed layer header");
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) in >> w(i, j);
        Eigen::VectorXd b(rows);
        for (Eigen::Index i = 0; i < rows; ++i) in >> b(i);
        if (!in) throw std::runtime_error("load_model: truncated file " + path);
        model.weights.push_back(w);
        model.biases.push_back(b);
    }
    return model;
}

void save_loo_csv(const Dataset& data, const LooResult& result, const std::string& path, double margin) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_loo_csv: cannot open " + path);
    out.precision(17);
    out << "sample_id,actual,predicted,ideal,margin_lo,margin_hi\n";
    for (Eigen::Index i = 0; i < data.targets.size(); ++i)
        out << i << "," << data.targets(i) << "," << result.predictions(i) << "," << data.targets(i)
            << "," << data.targets(i) - margin << "," << data.targets(i) + margin << "\n";
    std::ofstream summary(path + ".summary");
    summary.precision(17);
    summary << "r2=" << (result.r2_defined ? std::to_string(result.r2) : "undefined") << "\n";
    summary << "rmse=" << result.rmse << "\n";
}

}  // namespace geokp
