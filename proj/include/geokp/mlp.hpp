#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geokp/mesh.hpp"

namespace geokp {

// 15 features: hip keypoint (3), backbone lengths (3), bone vectors (9),
// ordered Femur, Tibia, Fibula with x,y,z components.
struct HipFeatures {
    Eigen::Matrix<double, 15, 1> values;
};

struct HipBoneTable {
    std::string hip_joint = "Illium";
    std::vector<Bone> bones = {{"Femur", "Hip L", "Stifle L"},
                               {"Tibia", "Stifle L", "Tarsal L"},
                               {"Fibula", "Stifle R", "Tarsal R"}};
};

// When `highest_point` is given, its vertical (z) component replaces the hip
// coordinate's z, matching the convention of measuring at the highest nearby
// scan point.
HipFeatures build_features(const std::map<std::string, Vec3>& joints, const HipBoneTable& table = {},
                           const std::optional<Vec3>& highest_point = std::nullopt);

// input -> 9 -> 7 -> 5 -> 1, ReLU on hidden layers, identity output.
struct MlpModel {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    static MlpModel make(int input_dim, uint64_t seed);
    int input_dim() const { return static_cast<int>(weights.front().cols()); }
};

double forward(const MlpModel& model, const Eigen::VectorXd& features);

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int epochs = 2000;
    uint64_t seed = 0;
};

struct Dataset {
    Eigen::MatrixXd features;  // samples x dims
    Eigen::VectorXd targets;
};

struct TrainResult {
    MlpModel model;
    std::vector<double> loss_trace;  // MSE per epoch
};

// Full-batch Adam on MSE; deterministic per seed.
TrainResult train_adam(const MlpModel& init, const Dataset& data, const TrainConfig& config);

// Max relative error between analytic and central finite-difference gradients.
double gradient_check(const MlpModel& model, const Eigen::VectorXd& features, double target);

struct LooResult {
    double r2 = 0;
    bool r2_defined = true;
    double rmse = 0;
    Eigen::VectorXd predictions;
};

LooResult leave_one_out(const Dataset& data, const TrainConfig& config, int workers = 0);

Dataset load_dataset_csv(const std::string& path);  // feature columns + hip_height target
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);
void save_loo_csv(const Dataset& data, const LooResult& result, const std::string& path,
                  double margin = 3.0);

}  // namespace geokp
