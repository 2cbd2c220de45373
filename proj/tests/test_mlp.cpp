#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "geokp/mlp.hpp"

using namespace geokp;

namespace {

std::map<std::string, Vec3> standard_joints() {
    return {{"Illium", Vec3(0.1, 0.2, 0.6)},   {"Hip L", Vec3(0.0, 0.1, 0.5)},
            {"Stifle L", Vec3(0.0, 0.1, 0.3)}, {"Tarsal L", Vec3(0.05, 0.1, 0.1)},
            {"Stifle R", Vec3(0.0, -0.1, 0.3)}, {"Tarsal R", Vec3(0.05, -0.1, 0.1)}};
}

// tiny single-hidden-unit network whose output is reproducible by hand
MlpModel hand_model() {
    MlpModel model = MlpModel::make(2, 1);
    for (auto& w : model.weights) w.setZero();
    for (auto& b : model.biases) b.setZero();
    // route input[0] through the first unit of every layer with gain 2
    model.weights[0](0, 0) = 2.0;
    model.biases[0](0) = 1.0;
    model.weights[1](0, 0) = 1.0;
    model.weights[2](0, 0) = 1.0;
    model.weights[3](0, 0) = 3.0;
    model.biases[3](0) = -0.5;
    return model;
}

}  // namespace

TEST_CASE("build_features") {
    auto joints = standard_joints();
    SUBCASE("layout: hip, three lengths, three bone vectors") {
        HipFeatures f = build_features(joints);
        CHECK(f.values(0) == doctest::Approx(0.1));
        CHECK(f.values(1) == doctest::Approx(0.2));
        CHECK(f.values(2) == doctest::Approx(0.6));
        // Femur: Hip L -> Stifle L = (0,0,-0.2)
        CHECK(f.values(3) == doctest::Approx(0.2));
        CHECK(f.values(6) == doctest::Approx(0.0));
        CHECK(f.values(7) == doctest::Approx(0.0));
        CHECK(f.values(8) == doctest::Approx(-0.2));
        // Tibia: Stifle L -> Tarsal L = (0.05,0,-0.2), length sqrt(0.0425)
        CHECK(f.values(4) == doctest::Approx(std::sqrt(0.05 * 0.05 + 0.2 * 0.2)));
        CHECK(f.values(9) == doctest::Approx(0.05));
        CHECK(f.values(11) == doctest::Approx(-0.2));
        // Fibula mirrors Tibia on the right side
        CHECK(f.values(5) == doctest::Approx(f.values(4)));
    }
    SUBCASE("highest point overrides only the hip z") {
        HipFeatures f = build_features(joints, {}, Vec3(9, 9, 0.77));
        CHECK(f.values(0) == doctest::Approx(0.1));
        CHECK(f.values(1) == doctest::Approx(0.2));
        CHECK(f.values(2) == doctest::Approx(0.77));
    }
    SUBCASE("missing joint rejected") {
        joints.erase("Tarsal R");
        CHECK_THROWS(build_features(joints));
    }
}

TEST_CASE("forward pass") {
    SUBCASE("architecture is input->9->7->5->1") {
        MlpModel model = MlpModel::make(15, 3);
        REQUIRE(model.weights.size() == 4);
        CHECK(model.weights[0].rows() == 9);
        CHECK(model.weights[0].cols() == 15);
        CHECK(model.weights[1].rows() == 7);
        CHECK(model.weights[2].rows() == 5);
        CHECK(model.weights[3].rows() == 1);
        CHECK(model.input_dim() == 15);
    }
    SUBCASE("zero weights give the output bias") {
        MlpModel model = MlpModel::make(4, 0);
        for (auto& w : model.weights) w.setZero();
        for (auto& b : model.biases) b.setZero();
        model.biases.back()(0) = 0.25;
        CHECK(forward(model, Eigen::Vector4d(1, 2, 3, 4)) == doctest::Approx(0.25));
    }
    SUBCASE("hand-computed chain") {
        MlpModel model = hand_model();
        // x=1.5: relu(2*1.5+1)=4 -> 4 -> 4 -> 3*4-0.5 = 11.5
        CHECK(forward(model, Eigen::Vector2d(1.5, -7)) == doctest::Approx(11.5).epsilon(1e-12));
        // x=-2: relu(2*-2+1)=0 -> output bias only
        CHECK(forward(model, Eigen::Vector2d(-2, 3)) == doctest::Approx(-0.5).epsilon(1e-12));
    }
    SUBCASE("deterministic init per seed") {
        MlpModel a = MlpModel::make(15, 42);
        MlpModel b = MlpModel::make(15, 42);
        MlpModel c = MlpModel::make(15, 43);
        CHECK((a.weights[0] - b.weights[0]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.weights[0] - c.weights[0]).cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("gradient check against central finite differences") {
    std::mt19937 rng(17);
    std::normal_distribution<double> gauss(0, 1);
    SUBCASE("random points stay under 1e-4") {
        for (int trial = 0; trial < 10; ++trial) {
            MlpModel model = MlpModel::make(6, 100 + trial);
            Eigen::VectorXd x(6);
            for (int i = 0; i < 6; ++i) x(i) = gauss(rng);
            CHECK(gradient_check(model, x, gauss(rng)) < 1e-4);
        }
    }
    SUBCASE("all-active linear region is near machine precision") {
        MlpModel model = MlpModel::make(3, 7);
        for (auto& w : model.weights) w = w.cwiseAbs();  // positive weights
        for (auto& b : model.biases) b.setConstant(0.5);  // positive preactivations
        CHECK(gradient_check(model, Eigen::Vector3d(0.2, 0.4, 0.8), 1.0) < 1e-6);
    }
    SUBCASE("fully dead network has zero weight gradients and still checks out") {
        MlpModel model = MlpModel::make(3, 7);
        for (auto& b : model.biases) b.setConstant(-100.0);  // every ReLU off
        CHECK(gradient_check(model, Eigen::Vector3d(0.1, 0.1, 0.1), 2.0) < 1e-6);
    }
}

TEST_CASE("train_adam") {
    // memorize a tiny smooth function of two inputs
    Dataset data;
    data.features.resize(8, 2);
    data.targets.resize(8);
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> unit(-1, 1);
    for (int i = 0; i < 8; ++i) {
        double a = unit(rng), b = unit(rng);
        data.features.row(i) << a, b;
        data.targets(i) = 0.5 * a - 0.3 * b + 0.1;
    }
    TrainConfig config;
    config.epochs = 4000;

    SUBCASE("memorizes 8 samples to below 1e-6 MSE") {
        TrainResult result = train_adam(MlpModel::make(2, 11), data, config);
        REQUIRE(result.loss_trace.size() == 4000);
        CHECK(result.loss_trace.back() < 1e-6);
        for (int i = 0; i < 8; ++i)
            CHECK(forward(result.model, data.features.row(i).transpose()) ==
                  doctest::Approx(data.targets(i)).epsilon(0.01));
    }
    SUBCASE("loss drops by 100x from the first epoch") {
        TrainResult result = train_adam(MlpModel::make(2, 11), data, config);
        CHECK(result.loss_trace.back() * 100.0 < result.loss_trace.front());
    }
    SUBCASE("zero learning rate leaves the model untouched") {
        MlpModel init = MlpModel::make(2, 11);
        TrainConfig frozen = config;
        frozen.learning_rate = 0.0;
        frozen.epochs = 10;
        TrainResult result = train_adam(init, data, frozen);
        for (std::size_t l = 0; l < init.weights.size(); ++l)
            CHECK((result.model.weights[l] - init.weights[l]).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("deterministic across runs") {
        TrainResult a = train_adam(MlpModel::make(2, 11), data, config);
        TrainResult b = train_adam(MlpModel::make(2, 11), data, config);
        CHECK(a.loss_trace.back() == b.loss_trace.back());
        CHECK((a.model.weights[0] - b.model.weights[0]).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("dimension mismatch rejected") {
        CHECK_THROWS(train_adam(MlpModel::make(5, 11), data, config));
    }
}

TEST_CASE("leave_one_out") {
    SUBCASE("matches a direct reimplementation on 5 samples") {
        Dataset data;
        data.features.resize(5, 2);
        data.targets.resize(5);
        std::mt19937 rng(2);
        std::uniform_real_distribution<double> unit(-1, 1);
        for (int i = 0; i < 5; ++i) {
            data.features.row(i) << unit(rng), unit(rng);
            data.targets(i) = unit(rng);
        }
        TrainConfig config;
        config.epochs = 200;
        LooResult loo = leave_one_out(data, config);

        // brute force: for each fold, train on the other 4, predict the holdout
        Eigen::VectorXd expected(5);
        for (int hold = 0; hold < 5; ++hold) {
            Dataset fold;
            fold.features.resize(4, 2);
            fold.targets.resize(4);
            int r = 0;
            for (int i = 0; i < 5; ++i) {
                if (i == hold) continue;
                fold.features.row(r) = data.features.row(i);
                fold.targets(r) = data.targets(i);
                ++r;
            }
            TrainResult t = train_adam(MlpModel::make(2, config.seed), fold, config);
            expected(hold) = forward(t.model, data.features.row(hold).transpose());
        }
        CHECK((loo.predictions - expected).cwiseAbs().maxCoeff() < 1e-12);

        double ss_res = (data.targets - expected).squaredNorm();
        Eigen::VectorXd centered = data.targets.array() - data.targets.mean();
        CHECK(loo.r2 == doctest::Approx(1.0 - ss_res / centered.squaredNorm()).epsilon(1e-12));
        CHECK(loo.rmse == doctest::Approx(std::sqrt(ss_res / 5)).epsilon(1e-12));
    }
    SUBCASE("parallel workers give identical predictions") {
        Dataset data;
        data.features.resize(8, 3);
        data.targets.resize(8);
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> unit(-1, 1);
        for (int i = 0; i < 8; ++i) {
            data.features.row(i) << unit(rng), unit(rng), unit(rng);
            data.targets(i) = unit(rng);
        }
        TrainConfig config;
        config.epochs = 150;
        LooResult serial = leave_one_out(data, config, 0);
        LooResult parallel = leave_one_out(data, config, 4);
        CHECK((serial.predictions - parallel.predictions).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("constant targets leave r2 undefined") {
        Dataset data;
        data.features = Eigen::MatrixXd::Random(6, 2);
        data.targets = Eigen::VectorXd::Constant(6, 3.0);
        TrainConfig config;
        config.epochs = 50;
        LooResult loo = leave_one_out(data, config);
        CHECK_FALSE(loo.r2_defined);
    }
    SUBCASE("recovers a smooth allometric-style relation with r2 above 0.8") {
        // height grows with limb length plus mild noise; LOO should generalize
        Dataset data;
        const int n = 24;
        data.features.resize(n, 3);
        data.targets.resize(n);
        std::mt19937 rng(12);
        std::uniform_real_distribution<double> limb(0.2, 0.8);
        std::normal_distribution<double> jitter(0, 0.01);
        for (int i = 0; i < n; ++i) {
            double femur = limb(rng), tibia = 0.9 * femur + 0.05 * limb(rng), girth = limb(rng);
            data.features.row(i) << femur, tibia, girth;
            data.targets(i) = 1.1 * femur + 0.9 * tibia + jitter(rng);
        }
        TrainConfig config;
        config.epochs = 2000;
        LooResult loo = leave_one_out(data, config, 4);
        CHECK(loo.r2_defined);
        CHECK(loo.r2 > 0.8);
        CHECK(loo.rmse < 0.1);
    }
}

TEST_CASE("model file round trip") {
    MlpModel model = MlpModel::make(15, 99);
    const char* path = "mlp_roundtrip.txt";
    save_model(model, path);
    MlpModel back = load_model(path);
    REQUIRE(back.weights.size() == model.weights.size());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        CHECK((back.weights[l] - model.weights[l]).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((back.biases[l] - model.biases[l]).cwiseAbs().maxCoeff() < 1e-15);
    }
    // same predictions after the round trip
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(15, -1, 1);
    CHECK(forward(back, x) == doctest::Approx(forward(model, x)).epsilon(1e-12));
    std::remove(path);

    SUBCASE("missing file rejected") {
        CHECK_THROWS(load_model("mlp_does_not_exist.txt"));
    }
}

TEST_CASE("dataset csv loading") {
    const char* path = "hip_dataset_test.csv";
    {
        std::ofstream out(path);
        out << "f0,f1,f2,hip_height\n";
        out << "0.1,0.2,0.3,0.55\n";
        out << "0.4,0.5,0.6,0.75\n";
    }
    Dataset data = load_dataset_csv(path);
    REQUIRE(data.features.rows() == 2);
    REQUIRE(data.features.cols() == 3);
    CHECK(data.features(0, 0) == doctest::Approx(0.1));
    CHECK(data.features(1, 2) == doctest::Approx(0.6));
    CHECK(data.targets(0) == doctest::Approx(0.55));
    CHECK(data.targets(1) == doctest::Approx(0.75));
    std::remove(path);

    SUBCASE("loo csv export writes one row per sample plus the summary file") {
        Dataset d;
        d.features = Eigen::MatrixXd::Random(3, 2);
        d.targets = Eigen::VectorXd::LinSpaced(3, 1, 3);
        LooResult loo;
        loo.predictions = d.targets.array() + 0.5;
        loo.r2 = 0.9;
        loo.rmse = 0.5;
        const char* loo_path = "loo_test.csv";
        save_loo_csv(d, loo, loo_path);
        std::ifstream in(loo_path);
        REQUIRE(in.good());
        std::string line;
        int rows = 0;
        while (std::getline(in, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 4);  // header + 3 samples
        std::ifstream summary(std::string(loo_path) + ".summary");
        CHECK(summary.good());
        std::remove(loo_path);
        std::remove((std::string(loo_path) + ".summary").c_str());
    }
}
